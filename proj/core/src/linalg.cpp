#include "dqhelmert/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "dqhelmert/errors.hpp"

namespace dqhelmert {
namespace {

void RequireSquare(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << ", expected square";
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

double OneNorm(const DenseMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Row and column scalings by powers of two (so the scaling itself is exact)
// that bring every row and column to unit max-norm.
struct Equilibration {
  Eigen::VectorXd row;
  Eigen::VectorXd col;
};

Equilibration Equilibrate(const DenseMatrix& m) {
  const Eigen::Index n = m.rows();
  Equilibration eq{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n)};
  for (int sweep = 0; sweep < 8; ++sweep) {
    const DenseMatrix scaled = eq.row.asDiagonal() * m * eq.col.asDiagonal();
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row_max = scaled.row(i).cwiseAbs().maxCoeff();
      const double col_max = scaled.col(i).cwiseAbs().maxCoeff();
      if (row_max > 0.0) {
        const double f = std::exp2(-std::round(0.5 * std::log2(row_max)));
        changed |= f != 1.0;
        eq.row[i] *= f;
      }
      if (col_max > 0.0) {
        const double f = std::exp2(-std::round(0.5 * std::log2(col_max)));
        changed |= f != 1.0;
        eq.col[i] *= f;
      }
    }
    if (!changed) break;
  }
  return eq;
}

// LU of diag(row) M diag(col); M⁻¹ = diag(col) (·)⁻¹ diag(row).
struct Factorization {
  Equilibration eq;
  Eigen::FullPivLU<DenseMatrix> lu;

  DenseVector solve(const DenseVector& w) const {
    return eq.col.asDiagonal() * lu.solve(eq.row.asDiagonal() * w);
  }
  DenseMatrix inverse() const {
    return eq.col.asDiagonal() * lu.inverse() * eq.row.asDiagonal();
  }
};

Factorization Factorize(const DenseMatrix& m) {
  RequireSquare(m);
  if (m.size() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "empty matrix");
  }
  if (!m.allFinite() || m.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::kSingular, "matrix is zero or non-finite");
  }
  Factorization f{Equilibrate(m), {}};
  const DenseMatrix scaled = f.eq.row.asDiagonal() * m * f.eq.col.asDiagonal();
  const double scale = scaled.cwiseAbs().maxCoeff();
  f.lu.compute(scaled);
  const double min_pivot = f.lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > kSingularPivotRatio * scale)) {
    std::ostringstream os;
    os << "matrix is singular (pivot " << min_pivot << " vs scale " << scale
       << " after equilibration)";
    throw Error(ErrorCode::kSingular, os.str());
  }
  return f;
}

}  // namespace

DenseVector SolveSquare(const DenseMatrix& m, const DenseVector& w) {
  RequireSquare(m);
  if (m.rows() != w.size()) {
    std::ostringstream os;
    os << "matrix has " << m.rows() << " rows but right-hand side has "
       << w.size();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  return Factorize(m).solve(w);
}

DenseMatrix Invert(const DenseMatrix& m) { return Factorize(m).inverse(); }

InverseWithCondition InvertWithCondition(const DenseMatrix& m) {
  InverseWithCondition out;
  out.inverse = Factorize(m).inverse();
  out.condition = std::max(1.0, OneNorm(m) * OneNorm(out.inverse));
  return out;
}

double ConditionEstimate(const DenseMatrix& m) {
  try {
    return InvertWithCondition(m).condition;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSingular) {
      return std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

}  // namespace dqhelmert
