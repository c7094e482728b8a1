#include "dqhelmert/qa.hpp"

#include "dqhelmert/jacobians.hpp"
#include "eiv_common.hpp"
#include "reduced_engine.hpp"

namespace dqhelmert {
namespace {

Quaternion FullRotation(const Vec3& r123) {
  const double r4 = DependentQuats(r123, Vec3::Zero()).first;
  return Quaternion(r123.x(), r123.y(), r123.z(), r4);
}

class QaModel {
 public:
  using State = QaState;

  explicit QaModel(const Problem& problem) : problem_(problem) {}

  State Initial() const { return {}; }

  ReducedLinearization Linearize(const State& state,
                                 const DenseVector& v) const {
    return LinearizeQa(problem_, state, v);
  }

  State Update(const State& state, const DenseVector& delta) const {
    State next = state;
    next.t += delta.segment<3>(0);
    next.r123 += delta.segment<3>(3);
    next.lambda += delta[6];
    FullRotation(next.r123);
    return next;
  }

  double Lambda(const State& state) const { return state.lambda; }

  State PlanarTwin(const State& state) const {
    const DualQuaternion twin = detail::PlanarTwin(Expand(state));
    FullRotation(twin.r.vec());
    return {state.t, twin.r.vec(), -state.lambda};
  }

  DualQuaternion Expand(const State& state) const {
    const Quaternion r = FullRotation(state.r123);
    return {r, DualPartFromTranslation(r, state.t)};
  }

 private:
  const Problem& problem_;
};

}  // namespace

Vec3 EvalQaModel(const QaState& state, const Vec3& source, const Vec3& target) {
  return target - state.t -
         state.lambda * (RotationQuadraticForm(FullRotation(state.r123)) * source);
}

ReducedLinearization LinearizeQa(const Problem& problem, const QaState& state,
                                 const DenseVector& v_prev) {
  const int n = problem.size();
  const Quaternion r = FullRotation(state.r123);
  const Mat3 rot = RotationQuadraticForm(r);
  // ∂(r1..r4)/∂(r1, r2, r3)
  Eigen::Matrix<double, 4, 3> dr;
  dr.topRows<3>().setIdentity();
  dr.row(3) = -state.r123.transpose() / r.scalar();
  const detail::CorrectedPoints pts = detail::Correct(problem, v_prev);

  ReducedLinearization sys;
  sys.a = detail::ResidualCoefficients(problem, state.lambda, r);
  sys.b.resize(3 * n, 7);
  sys.f.resize(3 * n);
  for (int i = 0; i < n; ++i) {
    const Vec3& x = pts.source[i];
    sys.f.segment<3>(3 * i) = pts.target[i] - state.t - state.lambda * (rot * x);
    sys.b.block<3, 3>(3 * i, 0) = -Mat3::Identity();
    sys.b.block<3, 3>(3 * i, 3) =
        -state.lambda * RotatedPointJacobian(r, x) * dr;
    sys.b.block<3, 1>(3 * i, 6) = -rot * x;
  }
  sys.w = detail::Misclosure(problem, state.lambda, r, state.t, v_prev);
  return sys;
}

SolveResult SolveQa(const Problem& problem, const SolverOptions& options) {
  return detail::SolveReduced(problem, options, QaModel(problem), Method::kQa);
}

}  // namespace dqhelmert
