#include "dqhelmert/constrained.hpp"

#include <cmath>
#include <sstream>

#include "dqhelmert/jacobians.hpp"
#include "eiv_common.hpp"

namespace dqhelmert {
namespace {

int NumUnknowns(QuatForm form) { return form == QuatForm::kUnit ? 9 : 8; }
int NumConstraints(QuatForm form) { return form == QuatForm::kUnit ? 2 : 1; }

// M = [N 0 B; 0 0 C; −Bᵀ −Cᵀ 0]
DenseMatrix BorderedMatrix(const DenseMatrix& n, const LinearizedSystem& sys) {
  const Eigen::Index m = n.rows();
  const Eigen::Index c = sys.c.rows();
  const Eigen::Index k = sys.b.cols();
  DenseMatrix bordered = DenseMatrix::Zero(m + c + k, m + c + k);
  bordered.topLeftCorner(m, m) = n;
  bordered.block(0, m + c, m, k) = sys.b;
  bordered.block(m, m + c, c, k) = sys.c;
  bordered.block(m + c, 0, k, m) = -sys.b.transpose();
  bordered.block(m + c, m, k, c) = -sys.c.transpose();
  return bordered;
}

SolveResult Solve(const Problem& problem, const SolverOptions& options,
                  QuatForm form) {
  detail::RequireSolvable(problem);
  const int n = problem.size();
  const int m = 3 * n;
  const int nc = NumConstraints(form);
  const int nk = NumUnknowns(form);
  const DenseMatrix weight = BuildWeightMatrix(problem);
  const DenseMatrix cofactor = BuildCofactorMatrix(problem);

  SolveResult result;
  detail::InitResult(result, problem, Method::kDqaConstrained, form);

  ModelState state;
  DenseVector v = DenseVector::Zero(6 * n);
  LinearizedSystem sys;
  DenseVector solution;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    sys = Linearize(problem, state, v, form);
    const DenseMatrix normal = sys.a * cofactor * sys.a.transpose();
    const DenseMatrix bordered = BorderedMatrix(normal, sys);
    DenseVector rhs = DenseVector::Zero(bordered.rows());
    rhs.head(m) = -sys.w1;
    rhs.segment(m, nc) = -sys.w2;

    IterationRecord rec;
    rec.iteration = iter;
    try {
      solution = SolveSquare(bordered, rhs);
      rec.condition = ConditionEstimate(bordered);
    } catch (const Error& e) {
      throw detail::SingularNormal(e, result.trace);
    }

    const DenseVector delta = solution.tail(nk);
    Vec4 dr, ds;
    if (form == QuatForm::kUnit) {
      state.lambda += delta[0];
      rec.delta_lambda = delta[0];
      dr = delta.segment<4>(1);
      ds = delta.segment<4>(5);
    } else {
      dr = delta.segment<4>(0);
      ds = delta.segment<4>(4);
    }
    state.r.coeffs() += dr;
    state.s.coeffs() += ds;
    v = cofactor * sys.a.transpose() * solution.head(m);

    rec.step = dr.squaredNorm() + ds.squaredNorm();
    rec.objective = v.dot(weight * v);
    result.trace.push_back(rec);
    if (!std::isfinite(rec.step) || !state.r.isFinite()) {
      throw SolverError(ErrorCode::kSingularNormalMatrix,
                        "iteration diverged" + detail::FormatTrace(result.trace),
                        result.trace);
    }
    if (rec.step < options.tolerance &&
        std::abs(rec.delta_lambda) < options.tolerance) {
      // Planar data cannot tell λR from −λR∘Rz(π); keep the positive scale.
      if (form == QuatForm::kUnit && problem.dim == Dimension::k2D &&
          state.lambda < 0.0) {
        const DualQuaternion twin = detail::PlanarTwin({state.r, state.s});
        state = {-state.lambda, twin.r, twin.s};
        continue;
      }
      result.converged = true;
      result.iterations = iter;
      break;
    }
  }
  if (!result.converged) {
    std::ostringstream os;
    os << "no convergence after " << options.max_iterations << " iterations"
       << detail::FormatTrace(result.trace);
    throw SolverError(ErrorCode::kMaxIterationsExceeded, os.str(), result.trace);
  }

  result.k_a = solution.head(m);
  result.k_b = solution.segment(m, nc);
  result.v = v;

  // Covariance uses the normal matrix at the converged estimate.
  try {
    const LinearizedSystem final_sys = Linearize(problem, state, v, form);
    const DenseMatrix normal =
        final_sys.a * cofactor * final_sys.a.transpose();
    result.normal_inverse = Invert(BorderedMatrix(normal, final_sys));
  } catch (const Error& e) {
    throw detail::SingularNormal(e, result.trace);
  }

  if (form == QuatForm::kUnit) {
    result.lambda = state.lambda;
    result.r = Quaternion(state.r.coeffs().normalized());
    result.s = state.s;
  } else {
    const UnitAndScale unit = UnitFromScaled(state.r);
    result.lambda = unit.lambda;
    result.r = unit.r;
    result.s = Quaternion(state.s.coeffs() * std::sqrt(unit.lambda));
    result.scaled = DualQuaternion{state.r, state.s};
  }
  detail::FinishStatistics(result, weight);
  return result;
}

}  // namespace

Vec3 EvalModel(double lambda, const Quaternion& r, const Quaternion& s,
               const Vec3& source, const Vec3& target) {
  return target - TranslationFromDualQuat(r, s) -
         lambda * (RotationQuadraticForm(r) * source);
}

LinearizedSystem Linearize(const Problem& problem, const ModelState& state,
                           const DenseVector& v_prev, QuatForm form) {
  const int n = problem.size();
  const int nk = NumUnknowns(form);
  const double lambda = form == QuatForm::kUnit ? state.lambda : 1.0;
  const Quaternion& r = state.r;
  const Quaternion& s = state.s;
  const detail::CorrectedPoints pts = detail::Correct(problem, v_prev);

  LinearizedSystem sys;
  sys.a = detail::ResidualCoefficients(problem, lambda, r);
  sys.b.resize(3 * n, nk);
  sys.f.resize(3 * n);
  for (int i = 0; i < n; ++i) {
    sys.f.segment<3>(3 * i) = EvalModel(lambda, r, s, pts.source[i], pts.target[i]);
    const Mat39 b = ModelJacobian(lambda, r, s, pts.source[i]);
    sys.b.block(3 * i, 0, 3, nk) = form == QuatForm::kUnit
                                       ? DenseMatrix(b)
                                       : DenseMatrix(b.rightCols<8>());
  }
  sys.w1 = detail::Misclosure(problem, lambda, r, s, v_prev);

  const int offset = form == QuatForm::kUnit ? 1 : 0;
  if (form == QuatForm::kUnit) {
    sys.c = DenseMatrix::Zero(2, 9);
    sys.c.block<1, 4>(0, 1) = r.coeffs().transpose();
    sys.c.block<1, 4>(1, 1) = s.coeffs().transpose();
    sys.c.block<1, 4>(1, 5) = r.coeffs().transpose();
    sys.w2.resize(2);
    sys.w2 << 0.5 * (r.squaredNorm() - 1.0), r.dot(s);
  } else {
    sys.c = DenseMatrix::Zero(1, 8);
    sys.c.block<1, 4>(0, offset) = s.coeffs().transpose();
    sys.c.block<1, 4>(0, offset + 4) = r.coeffs().transpose();
    sys.w2.resize(1);
    sys.w2 << r.dot(s);
  }
  return sys;
}

SolveResult SolveConstrained(const Problem& problem,
                             const SolverOptions& options) {
  return Solve(problem, options, QuatForm::kUnit);
}

SolveResult SolveScaled(const Problem& problem, const SolverOptions& options) {
  return Solve(problem, options, QuatForm::kScaled);
}

double ClosureCheck(const SolveResult& result, const Problem& problem) {
  double worst = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const Vec3 x = problem.points[i].source + result.sourceCorrection(i);
    const Vec3 X = problem.points[i].target + result.targetCorrection(i);
    const Vec3 dev = EvalModel(result.lambda, result.r, result.s, x, X);
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
  }
  return worst;
}

Vec3 TransformPoint(const SolveResult& result, const Vec3& source) {
  Vec4 padded;
  padded << source, 0.0;
  const Vec4 out = TranslationFromDualQuat4(result.r, result.s) +
                   result.lambda * (WMatrix(result.r).transpose() *
                                    QMatrix(result.r) * padded);
  return out.head<3>();
}

}  // namespace dqhelmert
