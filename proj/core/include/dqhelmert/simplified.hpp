#pragma once

// Unconstrained errors-in-variables estimation: r4 and s4 are eliminated
// through the unity and orthogonality relations, leaving seven independent
// unknowns (r1, r2, r3, s1, s2, s3, λ).

#include <utility>

#include <Eigen/Core>

#include "dqhelmert/linalg.hpp"
#include "dqhelmert/problem.hpp"
#include "dqhelmert/quaternion.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert {

struct ReducedState {
  Vec3 r123 = Vec3::Zero();
  Vec3 s123 = Vec3::Zero();
  double lambda = 1.0;
};

// r4 = √(1 − |r123|²), s4 = −r123·s123 / r4. Only the positive r4 branch is
// representable, so rotations of 180° or more are rejected with
// kRotationTooLarge.
std::pair<double, double> DependentQuats(const Vec3& r123, const Vec3& s123);

// Full (r, s) rebuilt from the independent components.
DualQuaternion ExpandReduced(const Vec3& r123, const Vec3& s123);

// ∂(r1..r4, s1..s4)/∂(r1, r2, r3, s1, s2, s3).
Eigen::Matrix<double, 8, 6> DependentJacobian(const Vec3& r123,
                                              const Vec3& s123);

// Unknown order (r1, r2, r3, s1, s2, s3, λ).
struct ReducedLinearization {
  DenseMatrix a;   // 3n × 6n
  DenseMatrix b;   // 3n × 7
  DenseVector f;
  DenseVector w;   // f − A v_prev
};
ReducedLinearization LinearizeSimplified(const Problem& problem,
                                         const ReducedState& state,
                                         const DenseVector& v_prev);

// Throws SolverError (kInvalidProblem, kDegenerateGeometry,
// kSingularNormalMatrix, kMaxIterationsExceeded, kRotationTooLarge).
SolveResult SolveSimplified(const Problem& problem,
                            const SolverOptions& options = {});

}  // namespace dqhelmert
