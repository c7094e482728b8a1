#include "dqhelmert/problem.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "dqhelmert/errors.hpp"

namespace dqhelmert {
namespace {

constexpr double kCollinearRatio = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireCount(std::size_t got, int n, const char* what) {
  if (static_cast<int>(got) != n) {
    std::ostringstream os;
    os << what << " has " << got << " entries for " << n << " points";
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

void RequirePositive(double value, const char* what, int point) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " of point " << point + 1 << " must be positive, got "
       << value;
    throw Error(ErrorCode::kNonPositiveVariance, os.str());
  }
}

// Diagonal of P for the diagonal models; empty for FullMatrix.
Eigen::VectorXd DiagonalWeights(const Problem& problem) {
  const int n = problem.size();
  const WeightModel& model = problem.weights;
  if (!(model.sigma1_sq > 0.0) || !(model.sigma2_sq > 0.0)) {
    throw Error(ErrorCode::kNonPositiveVariance,
                "variances of unit weight must be positive");
  }
  Eigen::VectorXd d(6 * n);
  return std::visit(
      Overloaded{
          [&](const weights::Unit&) -> Eigen::VectorXd {
            d.setOnes();
            return d;
          },
          [&](const weights::PerPointVariances& v) -> Eigen::VectorXd {
            RequireCount(v.source.size(), n, "source variance list");
            RequireCount(v.target.size(), n, "target variance list");
            for (int i = 0; i < n; ++i) {
              RequirePositive(v.source[i], "source variance", i);
              RequirePositive(v.target[i], "target variance", i);
              d.segment<3>(3 * i).setConstant(model.sigma1_sq / v.source[i]);
              d.segment<3>(3 * n + 3 * i)
                  .setConstant(model.sigma2_sq / v.target[i]);
            }
            return d;
          },
          [&](const weights::PerPointScalar& w) -> Eigen::VectorXd {
            RequireCount(w.weights.size(), n, "weight list");
            for (int i = 0; i < n; ++i) {
              RequirePositive(w.weights[i], "weight", i);
              d.segment<3>(3 * i).setConstant(w.weights[i]);
              d.segment<3>(3 * n + 3 * i).setConstant(w.weights[i]);
            }
            return d;
          },
          [&](const weights::FullMatrix&) -> Eigen::VectorXd {
            return Eigen::VectorXd();
          },
      },
      model.kind);
}

const DenseMatrix& CheckedFullMatrix(const Problem& problem) {
  const auto& full = std::get<weights::FullMatrix>(problem.weights.kind);
  const int m = 6 * problem.size();
  if (full.p.rows() != m || full.p.cols() != m) {
    std::ostringstream os;
    os << "weight matrix is " << full.p.rows() << "x" << full.p.cols()
       << ", expected " << m << "x" << m;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  if (!full.p.allFinite() ||
      (full.p - full.p.transpose()).cwiseAbs().maxCoeff() >
          1e-12 * full.p.cwiseAbs().maxCoeff()) {
    throw Error(ErrorCode::kNonPositiveVariance,
                "weight matrix must be symmetric and finite");
  }
  Eigen::LLT<DenseMatrix> llt(full.p);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonPositiveVariance,
                "weight matrix is not positive definite");
  }
  return full.p;
}

}  // namespace

DenseMatrix BuildWeightMatrix(const Problem& problem) {
  if (std::holds_alternative<weights::FullMatrix>(problem.weights.kind)) {
    return CheckedFullMatrix(problem);
  }
  return DiagonalWeights(problem).asDiagonal();
}

DenseMatrix BuildCofactorMatrix(const Problem& problem) {
  if (std::holds_alternative<weights::FullMatrix>(problem.weights.kind)) {
    const DenseMatrix& p = CheckedFullMatrix(problem);
    return p.llt().solve(DenseMatrix::Identity(p.rows(), p.cols()));
  }
  return DiagonalWeights(problem).cwiseInverse().asDiagonal();
}

std::vector<Diagnostic> ValidateProblem(const Problem& problem) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) {
    out.push_back({Diagnostic::Severity::kError, std::move(msg)});
  };
  const int n = problem.size();
  if (n < 3) {
    std::ostringstream os;
    os << "insufficient control points: " << n << " given, at least 3 needed";
    error(os.str());
  }
  std::set<std::string> seen;
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    const auto& p = problem.points[i];
    if (!p.id.empty() && !seen.insert(p.id).second) {
      error("duplicated point id '" + p.id + "'");
    }
    if (!p.source.allFinite() || !p.target.allFinite()) {
      error("non-finite coordinates at point " + std::to_string(i + 1));
      finite = false;
    }
    if (problem.dim == Dimension::k2D &&
        (p.source.z() != 0.0 || p.target.z() != 0.0)) {
      error("planar problem has non-zero z at point " + std::to_string(i + 1));
    }
  }
  try {
    BuildWeightMatrix(problem);
  } catch (const Error& e) {
    error(e.what());
  }
  if (n >= 2 && finite) {
    const int cols = problem.dim == Dimension::k2D ? 2 : 3;
    for (const bool source : {true, false}) {
      Eigen::MatrixXd xyz(n, cols);
      for (int i = 0; i < n; ++i) {
        const Vec3& c = source ? problem.points[i].source : problem.points[i].target;
        xyz.row(i) = c.head(cols).transpose();
      }
      xyz.rowwise() -= xyz.colwise().mean();
      const Eigen::VectorXd sv =
          Eigen::JacobiSVD<Eigen::MatrixXd>(xyz).singularValues();
      // Coplanar sets are fine; a rank-1 set leaves the rotation about its
      // line undetermined.
      const double second = sv.size() > 1 ? sv[1] : 0.0;
      if (sv[0] == 0.0 || second < kCollinearRatio * sv[0]) {
        out.push_back({Diagnostic::Severity::kWarning,
                       std::string(source ? "source" : "target") +
                           " points are (near-)collinear"});
      }
    }
  }
  return out;
}

bool HasErrors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) return true;
  }
  return false;
}

int DegreesOfFreedom(const Problem& problem) { return 3 * problem.size() - 7; }

int PlanarDegreesOfFreedom(const Problem& problem) {
  return 2 * problem.size() - 4;
}

}  // namespace dqhelmert
