#include "dqhelmert/precision.hpp"

#include <cmath>

#include "dqhelmert/jacobians.hpp"
#include "dqhelmert/simplified.hpp"

namespace dqhelmert {
namespace {

Vec6 SqrtDiagonal(const Mat6& cov) {
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Mat6 Symmetrize(const Mat6& m) { return 0.5 * (m + m.transpose()); }

SixParams WithCovariance(const SolveResult& result, const Mat6& cov) {
  SixParams six = GeometricParameters(result);
  six.cov = Symmetrize(cov);
  six.sigma = SqrtDiagonal(six.cov);
  return six;
}

void RequireMethod(const SolveResult& result, Method method) {
  if (result.method != method || result.normal_inverse.size() == 0) {
    throw Error(ErrorCode::kInvalidProblem,
                std::string("covariance requested for a ") +
                    std::string(ToString(result.method)) +
                    " result without a retained normal matrix inverse");
  }
}

}  // namespace

SixParams GeometricParameters(const SolveResult& result) {
  SixParams six;
  six.angles = EulerFromUnitQuat(result.r);
  six.translation = result.translation();
  return six;
}

Eigen::Matrix<double, 6, 8> SixParamJacobian(const Quaternion& r,
                                             const Quaternion& s) {
  Eigen::Matrix<double, 6, 8> j = Eigen::Matrix<double, 6, 8>::Zero();
  j.block<3, 4>(0, 0) = EulerJacobian(r);
  j.block<3, 8>(3, 0) = TranslationJacobian(r, s);
  return j;
}

CovarianceReport CovarianceConstrained(const SolveResult& result) {
  RequireMethod(result, Method::kDqaConstrained);
  CovarianceReport report;
  const double var0 = result.sigma0 * result.sigma0;
  report.full = var0 * result.normal_inverse;
  if (result.form == QuatForm::kUnit) {
    report.quaternion_block = report.full.bottomRightCorner(9, 9);
    report.labels = {"lambda", "r1", "r2", "r3", "r4", "s1", "s2", "s3", "s4"};
    const Eigen::VectorXd d =
        report.quaternion_block.diagonal().cwiseMax(0.0).cwiseSqrt();
    report.sigma_lambda = d[0];
    report.sigma_r = d.segment<4>(1);
    report.sigma_s = Vec4(d.segment<4>(5));
  } else {
    report.quaternion_block = report.full.bottomRightCorner(8, 8);
    report.labels = {"qs1", "qs2", "qs3", "qs4", "ss1", "ss2", "ss3", "ss4"};
    const Eigen::VectorXd d =
        report.quaternion_block.diagonal().cwiseMax(0.0).cwiseSqrt();
    report.sigma_r = d.head<4>();
    report.sigma_s = Vec4(d.tail<4>());
    // λ = ‖q_s‖²
    const Vec4 grad = 2.0 * result.scaled->r.coeffs();
    report.sigma_lambda = std::sqrt(std::max(
        0.0, grad.dot(report.quaternion_block.topLeftCorner<4, 4>() * grad)));
  }
  return report;
}

SixParams SixParamCovariance(const SolveResult& result,
                             const CovarianceReport& report) {
  if (result.method != Method::kDqaConstrained) {
    return Covariance(result).six;
  }
  Eigen::Matrix<double, 6, 8> j;
  Eigen::Matrix<double, 8, 8> cqq;
  if (result.form == QuatForm::kUnit) {
    j = SixParamJacobian(result.r, result.s);
    cqq = report.quaternion_block.bottomRightCorner<8, 8>();
  } else {
    // Angles depend on q_s only through q_s/‖q_s‖.
    const Quaternion& qs = result.scaled->r;
    const Quaternion& ss = result.scaled->s;
    const Vec4 u = result.r.coeffs();
    const Mat4 normalize =
        (Mat4::Identity() - u * u.transpose()) / qs.norm();
    j.setZero();
    j.block<3, 4>(0, 0) = EulerJacobian(result.r) * normalize;
    j.block<3, 8>(3, 0) = TranslationJacobian(qs, ss);
    cqq = report.quaternion_block;
  }
  return WithCovariance(result, j * cqq * j.transpose());
}

CovarianceReport CovarianceSimplified(const SolveResult& result) {
  RequireMethod(result, Method::kDqaSimplified);
  CovarianceReport report;
  const double var0 = result.sigma0 * result.sigma0;
  report.full = var0 * result.normal_inverse;  // (r1, r2, r3, s1, s2, s3, λ)

  const Vec3 r123 = result.r.vec();
  const Vec3 s123 = result.s.vec();
  const Eigen::Matrix<double, 8, 6> d = DependentJacobian(r123, s123);

  Eigen::Matrix<double, 9, 7> g = Eigen::Matrix<double, 9, 7>::Zero();
  g(0, 6) = 1.0;
  g.block<8, 6>(1, 0) = d;
  report.quaternion_block = g * report.full * g.transpose();
  report.labels = {"lambda", "r1", "r2", "r3", "r4", "s1", "s2", "s3", "s4"};
  const Eigen::VectorXd sd =
      report.quaternion_block.diagonal().cwiseMax(0.0).cwiseSqrt();
  report.sigma_lambda = sd[0];
  report.sigma_r = sd.segment<4>(1);
  report.sigma_s = Vec4(sd.segment<4>(5));

  const Eigen::Matrix<double, 6, 6> jp = SixParamJacobian(result.r, result.s) * d;
  const Mat6 c6 = report.full.topLeftCorner<6, 6>();
  report.six = WithCovariance(result, jp * c6 * jp.transpose());
  return report;
}

CovarianceReport CovarianceQa(const SolveResult& result) {
  RequireMethod(result, Method::kQa);
  CovarianceReport report;
  const double var0 = result.sigma0 * result.sigma0;
  report.full = var0 * result.normal_inverse;  // (t_X, t_Y, t_Z, r1, r2, r3, λ)

  const Vec3 q = result.r.vec();
  Eigen::Matrix<double, 4, 3> dr;
  dr.topRows<3>().setIdentity();
  dr.row(3) = -q.transpose() / result.r.scalar();

  Eigen::Matrix<double, 5, 7> g = Eigen::Matrix<double, 5, 7>::Zero();
  g(0, 6) = 1.0;
  g.block<4, 3>(1, 3) = dr;
  report.quaternion_block = g * report.full * g.transpose();
  report.labels = {"lambda", "r1", "r2", "r3", "r4"};
  const Eigen::VectorXd sd =
      report.quaternion_block.diagonal().cwiseMax(0.0).cwiseSqrt();
  report.sigma_lambda = sd[0];
  report.sigma_r = sd.segment<4>(1);

  Eigen::Matrix<double, 6, 7> j = Eigen::Matrix<double, 6, 7>::Zero();
  j.block<3, 3>(0, 3) = EulerJacobian(result.r) * dr;
  j.block<3, 3>(3, 0).setIdentity();
  report.six = WithCovariance(result, j * report.full * j.transpose());
  return report;
}

CovarianceReport Covariance(const SolveResult& result) {
  switch (result.method) {
    case Method::kDqaConstrained: {
      CovarianceReport report = CovarianceConstrained(result);
      report.six = SixParamCovariance(result, report);
      return report;
    }
    case Method::kDqaSimplified:
      return CovarianceSimplified(result);
    case Method::kQa:
      return CovarianceQa(result);
  }
  throw Error(ErrorCode::kInvalidProblem, "unknown method");
}

}  // namespace dqhelmert
