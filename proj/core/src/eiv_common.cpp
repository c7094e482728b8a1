#include "eiv_common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dqhelmert::detail {

void RequireSolvable(const Problem& problem) {
  const auto diagnostics = ValidateProblem(problem);
  std::string errors;
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) {
      if (!errors.empty()) errors += "; ";
      errors += d.message;
    }
  }
  if (!errors.empty()) throw SolverError(ErrorCode::kInvalidProblem, errors);
  for (const auto& d : diagnostics) {
    throw SolverError(ErrorCode::kDegenerateGeometry, d.message);
  }
}

CorrectedPoints Correct(const Problem& problem, const DenseVector& v) {
  const int n = problem.size();
  CorrectedPoints out;
  out.source.reserve(n);
  out.target.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.source.push_back(problem.points[i].source + v.segment<3>(3 * i));
    out.target.push_back(problem.points[i].target + v.segment<3>(3 * n + 3 * i));
  }
  return out;
}

DenseMatrix ResidualCoefficients(const Problem& problem, double lambda,
                                 const Quaternion& r) {
  const int n = problem.size();
  DenseMatrix a = DenseMatrix::Zero(3 * n, 6 * n);
  a.rightCols(3 * n).setIdentity();
  if (problem.mode == Mode::kSymmetric) {
    const Mat3 block = -lambda * RotationQuadraticForm(r);
    for (int i = 0; i < n; ++i) a.block<3, 3>(3 * i, 3 * i) = block;
  }
  return a;
}

namespace {

using Vec3x = Eigen::Matrix<long double, 3, 1>;
using Mat3x = Eigen::Matrix<long double, 3, 3>;

Mat3x RotationExtended(const Quaternion& r) {
  const Vec3x q = r.vec().cast<long double>();
  const long double r4 = r.scalar();
  Mat3x c;
  c << 0, -q[2], q[1], q[2], 0, -q[0], -q[1], q[0], 0;
  return (r4 * r4 - q.squaredNorm()) * Mat3x::Identity() +
         2 * (q * q.transpose() + r4 * c);
}

DenseVector MisclosureExtended(const Problem& problem, long double lambda,
                               const Quaternion& r, const Vec3x& t,
                               const DenseVector& v) {
  const int n = problem.size();
  const Mat3x rot = lambda * RotationExtended(r);
  DenseVector w(3 * n);
  for (int i = 0; i < n; ++i) {
    Vec3x x = problem.points[i].source.cast<long double>();
    if (problem.mode == Mode::kAsymmetric) {
      x += v.segment<3>(3 * i).cast<long double>();
    }
    const Vec3x f = problem.points[i].target.cast<long double>() - t - rot * x;
    w.segment<3>(3 * i) = f.cast<double>();
  }
  return w;
}

}  // namespace

DenseVector Misclosure(const Problem& problem, double lambda,
                       const Quaternion& r, const Vec3& t, const DenseVector& v) {
  return MisclosureExtended(problem, lambda, r, t.cast<long double>(), v);
}

DenseVector Misclosure(const Problem& problem, double lambda,
                       const Quaternion& r, const Quaternion& s,
                       const DenseVector& v) {
  const long double r1 = r[0], r2 = r[1], r3 = r[2], r4 = r[3];
  const long double s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3];
  const Vec3x t(2 * (r2 * s3 - r1 * s4 - r3 * s2 + r4 * s1),
                2 * (r3 * s1 - r1 * s3 - r2 * s4 + r4 * s2),
                2 * (r1 * s2 - r2 * s1 - r3 * s4 + r4 * s3));
  return MisclosureExtended(problem, lambda, r, t, v);
}

DualQuaternion PlanarTwin(const DualQuaternion& dq) {
  auto turn = [](const Quaternion& q) {
    return Quaternion(q[1], -q[0], q[3], -q[2]);
  };
  DualQuaternion out{turn(dq.r), turn(dq.s)};
  if (out.r.scalar() < 0.0) {
    out.r.coeffs() = -out.r.coeffs();
    out.s.coeffs() = -out.s.coeffs();
  }
  return out;
}

void InitResult(SolveResult& result, const Problem& problem, Method method,
                QuatForm form) {
  result.method = method;
  result.form = form;
  result.mode = problem.mode;
  result.dim = problem.dim;
  result.num_points = problem.size();
  result.dof = DegreesOfFreedom(problem);
  result.dof_planar = PlanarDegreesOfFreedom(problem);
}

void FinishStatistics(SolveResult& result, const DenseMatrix& weight) {
  result.objective = result.v.dot(weight * result.v);
  result.sigma0 = result.dof > 0
                      ? std::sqrt(std::max(0.0, result.objective) / result.dof)
                      : 0.0;
  for (const auto& rec : result.trace) {
    if (rec.condition > kConditionWarning) {
      std::ostringstream os;
      os << "iteration " << rec.iteration << ": normal matrix condition "
         << rec.condition << " exceeds " << kConditionWarning;
      result.warnings.push_back(os.str());
    }
  }
}

std::string FormatTrace(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  for (const auto& rec : trace) {
    os << "\n  iter " << rec.iteration << ": step " << rec.step << ", dlambda "
       << rec.delta_lambda << ", vTPv " << rec.objective << ", cond "
       << rec.condition;
  }
  return os.str();
}

SolverError SingularNormal(const Error& cause,
                           std::vector<IterationRecord> trace) {
  return SolverError(ErrorCode::kSingularNormalMatrix,
                     std::string("normal matrix is singular: ") + cause.what(),
                     std::move(trace));
}

}  // namespace dqhelmert::detail
