#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqhelmert/errors.hpp"
#include "dqhelmert/linalg.hpp"
#include "dqhelmert/problem.hpp"
#include "dqhelmert/quaternion.hpp"

namespace dqhelmert {

enum class Method { kDqaConstrained, kDqaSimplified, kQa };
enum class QuatForm { kUnit, kScaled };

std::string_view ToString(Method method);
std::string_view ToString(QuatForm form);

struct SolverOptions {
  // Stop once δrᵀδr + δsᵀδs < tolerance and |δλ| < tolerance.
  double tolerance = 1e-11;
  int max_iterations = 100;
};

struct IterationRecord {
  int iteration = 0;
  double step = 0.0;          // δrᵀδr + δsᵀδs
  double delta_lambda = 0.0;
  double objective = 0.0;     // vᵀPv after the update
  double condition = 1.0;     // 1-norm condition of the normal matrix
  double step_scale = 1.0;    // fraction of the computed step applied
};

struct SolveResult {
  Method method = Method::kDqaConstrained;
  QuatForm form = QuatForm::kUnit;
  Mode mode = Mode::kSymmetric;
  Dimension dim = Dimension::k3D;
  int num_points = 0;

  // Unit form: ‖r‖ = 1, rᵀs = 0.
  double lambda = 1.0;
  Quaternion r;
  Quaternion s = Quaternion::Zero();
  // Scaled-quaternion estimates (q_s, s_s) when form == kScaled.
  std::optional<DualQuaternion> scaled;

  // Corrections added to the observations: source block (3n) then target
  // block (3n). Corrected coordinates satisfy the model exactly.
  DenseVector v;
  double objective = 0.0;  // vᵀPv
  double sigma0 = 0.0;
  int dof = 0;             // 3n − 7
  int dof_planar = 0;      // 2n − 4, meaningful for planar problems
  int iterations = 0;
  bool converged = false;

  // Constrained solver: k_a (3n) and k_b (2 or 1). Reduced solvers: k in k_a.
  DenseVector k_a;
  DenseVector k_b;
  // Inverse of the final normal matrix: the bordered M for the constrained
  // solver, BᵀN⁻¹B for the reduced ones. Not yet scaled by σ̂₀².
  DenseMatrix normal_inverse;

  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;

  Vec3 translation() const { return TranslationFromDualQuat(r, s); }
  Mat3 rotation() const { return RotationQuadraticForm(r); }

  // Source corrections of point i (v_x, v_y, v_z) and target corrections.
  Vec3 sourceCorrection(int i) const { return v.segment<3>(3 * i); }
  Vec3 targetCorrection(int i) const {
    return v.segment<3>(3 * num_points + 3 * i);
  }
};

// Solver failure carrying the iterations completed before it.
class SolverError : public Error {
 public:
  SolverError(ErrorCode code, const std::string& what,
              std::vector<IterationRecord> trace = {})
      : Error(code, what), trace_(std::move(trace)) {}

  const std::vector<IterationRecord>& trace() const { return trace_; }

 private:
  std::vector<IterationRecord> trace_;
};

}  // namespace dqhelmert
