#include "dqhelmert/simplified.hpp"

#include <cmath>
#include <sstream>

#include "dqhelmert/constrained.hpp"
#include "dqhelmert/jacobians.hpp"
#include "eiv_common.hpp"
#include "reduced_engine.hpp"

namespace dqhelmert {
namespace {

constexpr double kBranchMargin = 1e-12;

double PositiveR4(const Vec3& r123) {
  const double rest = 1.0 - r123.squaredNorm();
  if (!(rest >= kBranchMargin)) {
    std::ostringstream os;
    os << "|r123|^2 = " << r123.squaredNorm()
       << " leaves no real positive r4 (rotation of 180 degrees or more)";
    throw Error(ErrorCode::kRotationTooLarge, os.str());
  }
  return std::sqrt(rest);
}

// G = ∂(λ, r, s)/∂(r1, r2, r3, s1, s2, s3, λ).
Eigen::Matrix<double, 9, 7> FullFromReduced(const ReducedState& state) {
  Eigen::Matrix<double, 9, 7> g = Eigen::Matrix<double, 9, 7>::Zero();
  g(0, 6) = 1.0;
  g.block<8, 6>(1, 0) = DependentJacobian(state.r123, state.s123);
  return g;
}

class SimplifiedModel {
 public:
  using State = ReducedState;

  explicit SimplifiedModel(const Problem& problem) : problem_(problem) {}

  State Initial() const { return {}; }

  ReducedLinearization Linearize(const State& state,
                                 const DenseVector& v) const {
    return LinearizeSimplified(problem_, state, v);
  }

  State Update(const State& state, const DenseVector& delta) const {
    State next = state;
    next.r123 += delta.segment<3>(0);
    next.s123 += delta.segment<3>(3);
    next.lambda += delta[6];
    PositiveR4(next.r123);
    return next;
  }

  double Lambda(const State& state) const { return state.lambda; }

  State PlanarTwin(const State& state) const {
    const DualQuaternion twin = detail::PlanarTwin(Expand(state));
    PositiveR4(twin.r.vec());
    return {twin.r.vec(), twin.s.vec(), -state.lambda};
  }

  DualQuaternion Expand(const State& state) const {
    return ExpandReduced(state.r123, state.s123);
  }

 private:
  const Problem& problem_;
};

}  // namespace

std::pair<double, double> DependentQuats(const Vec3& r123, const Vec3& s123) {
  const double r4 = PositiveR4(r123);
  return {r4, -r123.dot(s123) / r4};
}

DualQuaternion ExpandReduced(const Vec3& r123, const Vec3& s123) {
  const auto [r4, s4] = DependentQuats(r123, s123);
  return {Quaternion(r123.x(), r123.y(), r123.z(), r4),
          Quaternion(s123.x(), s123.y(), s123.z(), s4)};
}

Eigen::Matrix<double, 8, 6> DependentJacobian(const Vec3& r123,
                                              const Vec3& s123) {
  const double r4 = PositiveR4(r123);
  const double qs = r123.dot(s123);
  Eigen::Matrix<double, 8, 6> d = Eigen::Matrix<double, 8, 6>::Zero();
  d.block<3, 3>(0, 0).setIdentity();
  d.block<1, 3>(3, 0) = -r123.transpose() / r4;
  d.block<3, 3>(4, 3).setIdentity();
  d.block<1, 3>(7, 0) =
      -s123.transpose() / r4 - qs * r123.transpose() / (r4 * r4 * r4);
  d.block<1, 3>(7, 3) = -r123.transpose() / r4;
  return d;
}

ReducedLinearization LinearizeSimplified(const Problem& problem,
                                         const ReducedState& state,
                                         const DenseVector& v_prev) {
  const int n = problem.size();
  const DualQuaternion dq = ExpandReduced(state.r123, state.s123);
  const Eigen::Matrix<double, 9, 7> g = FullFromReduced(state);
  const detail::CorrectedPoints pts = detail::Correct(problem, v_prev);

  ReducedLinearization sys;
  sys.a = detail::ResidualCoefficients(problem, state.lambda, dq.r);
  sys.b.resize(3 * n, 7);
  sys.f.resize(3 * n);
  for (int i = 0; i < n; ++i) {
    sys.f.segment<3>(3 * i) =
        EvalModel(state.lambda, dq.r, dq.s, pts.source[i], pts.target[i]);
    sys.b.block<3, 7>(3 * i, 0) =
        ModelJacobian(state.lambda, dq.r, dq.s, pts.source[i]) * g;
  }
  sys.w = detail::Misclosure(problem, state.lambda, dq.r, dq.s, v_prev);
  return sys;
}

SolveResult SolveSimplified(const Problem& problem,
                            const SolverOptions& options) {
  return detail::SolveReduced(problem, options, SimplifiedModel(problem),
                              Method::kDqaSimplified);
}

}  // namespace dqhelmert
