#pragma once

#include <Eigen/Core>

namespace dqhelmert {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

// After power-of-two row/column equilibration, a pivot smaller than this
// fraction of max|M| marks the matrix singular.
inline constexpr double kSingularPivotRatio = 1e-14;
// Condition numbers above this are reported as warnings by the solvers.
inline constexpr double kConditionWarning = 1e14;

// Solves M x = w with a fully pivoted LU of the equilibrated matrix. The
// bordered normal matrices built by the solvers are symmetric indefinite with
// zero diagonal blocks and mix entries of order 1e-1 with order 1e13, so both
// pivoting and scaling are needed.
//
// Throws kDimensionMismatch or kSingular.
DenseVector SolveSquare(const DenseMatrix& m, const DenseVector& w);

DenseMatrix Invert(const DenseMatrix& m);

// ‖M‖₁ ‖M⁻¹‖₁. Returns +inf for singular input.
double ConditionEstimate(const DenseMatrix& m);

// Inverse and its 1-norm condition number from a single factorization.
struct InverseWithCondition {
  DenseMatrix inverse;
  double condition = 1.0;
};
InverseWithCondition InvertWithCondition(const DenseMatrix& m);

}  // namespace dqhelmert
