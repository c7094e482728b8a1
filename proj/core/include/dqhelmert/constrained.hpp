#pragma once

// Constrained errors-in-variables estimation of (λ, r, s): unity and
// orthogonality of the dual quaternion are imposed through Lagrange
// multipliers in a bordered normal system, solved jointly with the
// multipliers of the observation equations.

#include "dqhelmert/linalg.hpp"
#include "dqhelmert/problem.hpp"
#include "dqhelmert/quaternion.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert {

inline constexpr double kClosureTolerance = 1e-8;

struct ModelState {
  double lambda = 1.0;
  Quaternion r = Quaternion::Identity();
  Quaternion s = Quaternion::Zero();
};

// X̂ − 2W(r)ᵀs − λ W(r)ᵀQ(r) x̂ on corrected coordinates.
Vec3 EvalModel(double lambda, const Quaternion& r, const Quaternion& s,
               const Vec3& source, const Vec3& target);

// A v + B δx + w₁ = 0,  C δx + w₂ = 0.
//
// Unknown order is (λ, r1..r4, s1..s4) for the unit form and (r1..r4,
// s1..s4) for the scaled form, where the scale is absorbed into r and the
// model is evaluated with λ = 1.
struct LinearizedSystem {
  DenseMatrix a;   // 3n × 6n
  DenseMatrix b;   // 3n × 9 (unit) or 3n × 8 (scaled)
  DenseMatrix c;   // 2 × 9 or 1 × 8
  DenseVector f;   // model value at the corrected coordinates
  DenseVector w1;  // f − A v_prev
  DenseVector w2;
};

// `v_prev` holds the previous corrections; the model is evaluated on the
// corrected coordinates and the misclosure is shifted back by A v_prev.
LinearizedSystem Linearize(const Problem& problem, const ModelState& state,
                           const DenseVector& v_prev,
                           QuatForm form = QuatForm::kUnit);

// Starts from λ = 1, r = (0,0,0,1), s = 0, v = 0.
// Throws SolverError (kInvalidProblem, kDegenerateGeometry,
// kSingularNormalMatrix, kMaxIterationsExceeded).
SolveResult SolveConstrained(const Problem& problem,
                             const SolverOptions& options = {});

// Scaled-quaternion variant: eight unknowns, only rᵀs = 0 imposed, and
// λ = ‖r‖² recovered afterwards.
SolveResult SolveScaled(const Problem& problem,
                        const SolverOptions& options = {});

// max over points of ‖(X + v_XYZ) − 2Wᵀs − λWᵀQ(x + v_xyz)‖∞ [m].
double ClosureCheck(const SolveResult& result, const Problem& problem);

// 2Wᵀs + λWᵀQ [p; 0].
Vec3 TransformPoint(const SolveResult& result, const Vec3& source);

}  // namespace dqhelmert
