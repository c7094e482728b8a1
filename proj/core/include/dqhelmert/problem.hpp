#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dqhelmert/linalg.hpp"
#include "dqhelmert/quaternion.hpp"

namespace dqhelmert {

// One control point observed in both frames.
struct ControlPointPair {
  std::string id;
  Vec3 source = Vec3::Zero();  // x, y, z [m]
  Vec3 target = Vec3::Zero();  // X, Y, Z [m]
};

namespace weights {

struct Unit {};

// Per-point coordinate variances [m²]; the weight of every coordinate of a
// point is σ₁²/var_src (source) and σ₂²/var_dst (target).
struct PerPointVariances {
  std::vector<double> source;
  std::vector<double> target;
};

// One dimensionless weight per point, applied to its six coordinates.
struct PerPointScalar {
  std::vector<double> weights;
};

// Full 6n×6n weight matrix, source block first.
struct FullMatrix {
  DenseMatrix p;
};

}  // namespace weights

struct WeightModel {
  std::variant<weights::Unit, weights::PerPointVariances,
               weights::PerPointScalar, weights::FullMatrix>
      kind = weights::Unit{};
  // Variances of unit weight of the two frames.
  double sigma1_sq = 1.0;
  double sigma2_sq = 1.0;
};

enum class Mode { kSymmetric, kAsymmetric };
enum class Dimension { k2D = 2, k3D = 3 };

struct Problem {
  std::vector<ControlPointPair> points;
  WeightModel weights;
  Mode mode = Mode::kSymmetric;
  Dimension dim = Dimension::k3D;

  int size() const { return static_cast<int>(points.size()); }
};

// 6n×6n block-diagonal P. Row order: x1 y1 z1 ... xn yn zn, then the target
// frame in the same order. Throws kNonPositiveVariance, kDimensionMismatch.
DenseMatrix BuildWeightMatrix(const Problem& problem);

// P⁻¹, computed blockwise for diagonal models.
DenseMatrix BuildCofactorMatrix(const Problem& problem);

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kError;
  std::string message;
};

// Collinear (or, in 2D, coincident) point sets are reported as warnings.
std::vector<Diagnostic> ValidateProblem(const Problem& problem);

bool HasErrors(const std::vector<Diagnostic>& diagnostics);

// Degrees of freedom: 3n − 7 for every dimension, and 2n − 4 for planar
// problems.
int DegreesOfFreedom(const Problem& problem);
int PlanarDegreesOfFreedom(const Problem& problem);

}  // namespace dqhelmert
