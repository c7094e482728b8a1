#pragma once

// Single-quaternion reference model: translations are direct unknowns,
// r4 is eliminated through unity, giving seven unknowns
// (t_X, t_Y, t_Z, r1, r2, r3, λ).

#include "dqhelmert/problem.hpp"
#include "dqhelmert/simplified.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert {

struct QaState {
  Vec3 t = Vec3::Zero();
  Vec3 r123 = Vec3::Zero();
  double lambda = 1.0;
};

// X̂ − t − λ R(r) x̂.
Vec3 EvalQaModel(const QaState& state, const Vec3& source, const Vec3& target);

// Unknown order (t_X, t_Y, t_Z, r1, r2, r3, λ).
ReducedLinearization LinearizeQa(const Problem& problem, const QaState& state,
                                 const DenseVector& v_prev);

SolveResult SolveQa(const Problem& problem, const SolverOptions& options = {});

}  // namespace dqhelmert
