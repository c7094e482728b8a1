#pragma once

// Closed-form partial derivatives of the similarity model
//   f(λ, r, s; x̂, X̂) = X̂ − 2W(r)ᵀs − λ W(r)ᵀQ(r) x̂     (first three rows)
// and of the derived geometric parameters.

#include <Eigen/Core>

#include "dqhelmert/quaternion.hpp"

namespace dqhelmert {

using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat38 = Eigen::Matrix<double, 3, 8>;
using Mat39 = Eigen::Matrix<double, 3, 9>;

// ∂(R(r) x)/∂(r1..r4) with R the quadratic form of RotationQuadraticForm.
Mat34 RotatedPointJacobian(const Quaternion& r, const Vec3& x);

// ∂t/∂(r1..r4, s1..s4) for t = 2W(r)ᵀs.
Mat38 TranslationJacobian(const Quaternion& r, const Quaternion& s);

// ∂f/∂(λ, r1..r4, s1..s4).
Mat39 ModelJacobian(double lambda, const Quaternion& r, const Quaternion& s,
                    const Vec3& source);

// ∂(ε, ψ, ω)/∂(r1..r4) of the Euler extraction formulas, differentiated as
// written (no normalization). Throws kGimbalSingularity.
Mat34 EulerJacobian(const Quaternion& r);

}  // namespace dqhelmert
