#pragma once

// Precision of the estimates: covariance of the native unknowns scaled by
// σ̂₀², standard errors of λ and the quaternions, and the covariance of the
// six geometric parameters (ε, ψ, ω, t_x, t_y, t_z) by linear propagation.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dqhelmert/linalg.hpp"
#include "dqhelmert/quaternion.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct SixParams {
  EulerAngles angles;     // [rad]
  Vec3 translation = Vec3::Zero();
  Mat6 cov = Mat6::Zero();  // [rad², rad·m, m²]
  Vec6 sigma = Vec6::Zero();
};

struct CovarianceReport {
  // σ̂₀² times the inverse normal matrix, in the solver's native layout.
  DenseMatrix full;
  // Covariance of the quaternion parameters with labels, e.g.
  // (λ, r1..r4, s1..s4) for the unit forms, (r1..r4, s1..s4) of the scaled
  // quaternions, (λ, r1..r4) for the single-quaternion model.
  DenseMatrix quaternion_block;
  std::vector<std::string> labels;

  double sigma_lambda = 0.0;
  Vec4 sigma_r = Vec4::Zero();
  std::optional<Vec4> sigma_s;

  SixParams six;
};

// Constrained solver (unit or scaled form). Fills everything except `six`.
CovarianceReport CovarianceConstrained(const SolveResult& result);

// C_par = J C_qq Jᵀ for a constrained result. Throws kGimbalSingularity.
SixParams SixParamCovariance(const SolveResult& result,
                             const CovarianceReport& report);

// Unconstrained DQA: C₇ = σ̂₀²(BᵀN⁻¹B)⁻¹ with r4, s4 propagated. Complete.
CovarianceReport CovarianceSimplified(const SolveResult& result);

// Single-quaternion model; translations come straight from the unknowns.
CovarianceReport CovarianceQa(const SolveResult& result);

// Dispatches on result.method and always fills `six`.
CovarianceReport Covariance(const SolveResult& result);

// Six geometric parameters without precision.
SixParams GeometricParameters(const SolveResult& result);

// 6×8 ∂(ε, ψ, ω, t)/∂(r, s) at a unit dual quaternion.
Eigen::Matrix<double, 6, 8> SixParamJacobian(const Quaternion& r,
                                             const Quaternion& s);

}  // namespace dqhelmert
