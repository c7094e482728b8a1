#include "dqhelmert/jacobians.hpp"

#include <cmath>

#include "dqhelmert/errors.hpp"

namespace dqhelmert {

Mat34 RotatedPointJacobian(const Quaternion& r, const Vec3& x) {
  // R x = (r4² − qᵀq) x + 2 q (qᵀx) + 2 r4 q × x
  const Vec3 q = r.vec();
  const double r4 = r.scalar();
  Mat34 j;
  j.leftCols<3>() = -2.0 * x * q.transpose() +
                    2.0 * q.dot(x) * Mat3::Identity() +
                    2.0 * q * x.transpose() - 2.0 * r4 * Skew(x);
  j.col(3) = 2.0 * r4 * x + 2.0 * q.cross(x);
  return j;
}

Mat38 TranslationJacobian(const Quaternion& r, const Quaternion& s) {
  // t = 2 ((r4 I + C(q)) s_v − s4 q)
  const Vec3 q = r.vec();
  const Vec3 sv = s.vec();
  Mat38 j;
  j.block<3, 3>(0, 0) = -2.0 * Skew(sv) - 2.0 * s.scalar() * Mat3::Identity();
  j.col(3) = 2.0 * sv;
  j.block<3, 3>(0, 4) = 2.0 * (r.scalar() * Mat3::Identity() + Skew(q));
  j.col(7) = -2.0 * q;
  return j;
}

Mat39 ModelJacobian(double lambda, const Quaternion& r, const Quaternion& s,
                    const Vec3& source) {
  Mat39 b;
  b.col(0) = -RotationQuadraticForm(r) * source;
  const Mat38 dt = TranslationJacobian(r, s);
  b.block<3, 4>(0, 1) = -dt.leftCols<4>() - lambda * RotatedPointJacobian(r, source);
  b.block<3, 4>(0, 5) = -dt.rightCols<4>();
  return b;
}

Mat34 EulerJacobian(const Quaternion& r) {
  const double r1 = r[0], r2 = r[1], r3 = r[2], r4 = r[3];
  Mat34 j;

  // ε = −atan2(a, b)
  {
    const double a = 2.0 * (r4 * r1 + r2 * r3);
    const double b = r4 * r4 - r1 * r1 - r2 * r2 + r3 * r3;
    const Eigen::RowVector4d da(2.0 * r4, 2.0 * r3, 2.0 * r2, 2.0 * r1);
    const Eigen::RowVector4d db(-2.0 * r1, -2.0 * r2, 2.0 * r3, 2.0 * r4);
    j.row(0) = -(b * da - a * db) / (a * a + b * b);
  }
  // ψ = asin(c)
  {
    const double c = 2.0 * (r3 * r1 - r4 * r2);
    const double cos_psi = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (std::hypot(2.0 * (r4 * r3 + r2 * r1),
                   r4 * r4 + r1 * r1 - r2 * r2 - r3 * r3) < kGimbalThreshold ||
        cos_psi == 0.0) {
      throw Error(ErrorCode::kGimbalSingularity,
                  "Euler Jacobian undefined at |cos psi| < 1e-12");
    }
    const Eigen::RowVector4d dc(2.0 * r3, -2.0 * r4, 2.0 * r1, -2.0 * r2);
    j.row(1) = dc / cos_psi;
  }
  // ω = −atan2(a, b)
  {
    const double a = 2.0 * (r4 * r3 + r2 * r1);
    const double b = r4 * r4 + r1 * r1 - r2 * r2 - r3 * r3;
    const Eigen::RowVector4d da(2.0 * r2, 2.0 * r1, 2.0 * r4, 2.0 * r3);
    const Eigen::RowVector4d db(2.0 * r1, -2.0 * r2, -2.0 * r3, 2.0 * r4);
    j.row(2) = -(b * da - a * db) / (a * a + b * b);
  }
  return j;
}

}  // namespace dqhelmert
