#pragma once

// Iteration shared by the unconstrained solvers:
//   δx = −(BᵀN⁻¹B)⁻¹BᵀN⁻¹w,  k = −N⁻¹(Bδx + w),  v = P⁻¹Aᵀk
// with w the misclosure shifted by the previous corrections.

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "dqhelmert/simplified.hpp"
#include "eiv_common.hpp"

namespace dqhelmert::detail {

inline constexpr int kMaxHalvings = 30;
// Halvings past the first feasible step before falling back to it.
inline constexpr int kMaxBacktracks = 10;

// Model requirements:
//   using State;  State Initial() const;
//   ReducedLinearization Linearize(const State&, const DenseVector& v) const;
//   State Update(const State&, const DenseVector& delta) const;  (may throw)
//   double Lambda(const State&) const;
//   DualQuaternion Expand(const State&) const;
//   State PlanarTwin(const State&) const;  (λ → −λ, r → r∘k; may throw)
template <class Model>
SolveResult SolveReduced(const Problem& problem, const SolverOptions& options,
                         const Model& model, Method method) {
  RequireSolvable(problem);
  const int n = problem.size();
  const DenseMatrix weight = BuildWeightMatrix(problem);
  const DenseMatrix cofactor = BuildCofactorMatrix(problem);

  SolveResult result;
  InitResult(result, problem, method, QuatForm::kUnit);

  auto state = model.Initial();
  DenseVector v = DenseVector::Zero(6 * n);
  DenseVector k;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const ReducedLinearization sys = model.Linearize(state, v);
    const DenseMatrix normal = sys.a * cofactor * sys.a.transpose();
    Eigen::LLT<DenseMatrix> llt(normal);
    if (llt.info() != Eigen::Success) {
      throw SolverError(ErrorCode::kSingularNormalMatrix,
                        "N = A P^-1 A^T is not positive definite",
                        result.trace);
    }
    const DenseMatrix ninv_b = llt.solve(sys.b);
    const DenseMatrix reduced = sys.b.transpose() * ninv_b;

    IterationRecord rec;
    rec.iteration = iter;
    DenseVector delta;
    try {
      delta = -SolveSquare(reduced, sys.b.transpose() * llt.solve(sys.w));
      rec.condition = ConditionEstimate(reduced);
    } catch (const Error& e) {
      throw SingularNormal(e, result.trace);
    }
    const DualQuaternion before = model.Expand(state);
    const double lambda_before = model.Lambda(state);
    // Ω(x) = wᵀN⁻¹w, the objective the iteration minimizes once the
    // corrections are eliminated.
    const double merit = sys.w.dot(llt.solve(sys.w));
    auto merit_at = [&](const auto& s) {
      const ReducedLinearization trial = model.Linearize(s, v);
      Eigen::LLT<DenseMatrix> n(trial.a * cofactor * trial.a.transpose());
      return trial.w.dot(n.solve(trial.w));
    };
    auto step_of = [&](const auto& s) {
      const DualQuaternion dq = model.Expand(s);
      return (dq.r.coeffs() - before.r.coeffs()).squaredNorm() +
             (dq.s.coeffs() - before.s.coeffs()).squaredNorm();
    };
    auto converges = [&](const auto& s) {
      return step_of(s) < options.tolerance &&
             std::abs(model.Lambda(s) - lambda_before) < options.tolerance;
    };
    // Halve steps that leave the r4 > 0 branch or increase Ω. A step that
    // never decreases Ω falls back to the longest feasible one.
    double alpha = 1.0, first_alpha = 0.0;
    auto next = state, first = state;
    for (int halvings = 0;; ++halvings, alpha *= 0.5) {
      try {
        next = model.Update(state, alpha * delta);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRotationTooLarge ||
            halvings == kMaxHalvings) {
          throw SolverError(e.code(), e.what(), result.trace);
        }
        continue;
      }
      if (first_alpha == 0.0) {
        first = next;
        first_alpha = alpha;
        if (alpha == 1.0 && converges(next)) break;
      }
      if (merit_at(next) <= merit) break;
      if (alpha <= std::ldexp(first_alpha, -kMaxBacktracks)) {
        next = first;
        alpha = first_alpha;
        break;
      }
    }
    state = next;
    delta *= alpha;
    rec.step_scale = alpha;
    k = -llt.solve(sys.b * delta + sys.w);
    v = cofactor * sys.a.transpose() * k;

    rec.delta_lambda = model.Lambda(state) - lambda_before;
    rec.step = step_of(state);
    rec.objective = v.dot(weight * v);
    result.trace.push_back(rec);
    if (!std::isfinite(rec.step)) {
      throw SolverError(ErrorCode::kSingularNormalMatrix,
                        "iteration diverged" + FormatTrace(result.trace),
                        result.trace);
    }
    if (alpha == 1.0 && converges(state)) {
      // Planar data cannot tell λR from −λR∘Rz(π); keep the positive scale.
      if (problem.dim == Dimension::k2D && model.Lambda(state) < 0.0) {
        state = model.PlanarTwin(state);
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
       << FormatTrace(result.trace);
    throw SolverError(ErrorCode::kMaxIterationsExceeded, os.str(), result.trace);
  }

  result.k_a = k;
  result.v = v;
  {
    const ReducedLinearization sys = model.Linearize(state, v);
    const DenseMatrix normal = sys.a * cofactor * sys.a.transpose();
    Eigen::LLT<DenseMatrix> llt(normal);
    try {
      result.normal_inverse = Invert(sys.b.transpose() * llt.solve(sys.b));
    } catch (const Error& e) {
      throw SingularNormal(e, result.trace);
    }
  }
  const DualQuaternion dq = model.Expand(state);
  result.lambda = model.Lambda(state);
  result.r = dq.r;
  result.s = dq.s;
  FinishStatistics(result, weight);
  return result;
}

}  // namespace dqhelmert::detail
