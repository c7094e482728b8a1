#include "dqhelmert/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "dqhelmert/errors.hpp"

namespace dqhelmert {
namespace {

void RequireUnit(const Quaternion& r) {
  const double norm = r.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    std::ostringstream os;
    os << "quaternion is not unit (norm " << norm << ")";
    throw Error(ErrorCode::kNotUnit, os.str());
  }
}

}  // namespace

bool DualQuaternion::isUnit(double tol) const {
  return std::abs(r.squaredNorm() - 1.0) <= tol && std::abs(r.dot(s)) <= tol;
}

double QuatNorm(const Quaternion& q) { return q.norm(); }

Mat3 Skew(const Vec3& v) {
  Mat3 c;
  c << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return c;
}

Mat4 WMatrix(const Quaternion& r) {
  Mat4 w;
  w.topLeftCorner<3, 3>() = r.scalar() * Mat3::Identity() - Skew(r.vec());
  w.topRightCorner<3, 1>() = r.vec();
  w.bottomLeftCorner<1, 3>() = -r.vec().transpose();
  w(3, 3) = r.scalar();
  return w;
}

Mat4 QMatrix(const Quaternion& r) {
  Mat4 q;
  q.topLeftCorner<3, 3>() = r.scalar() * Mat3::Identity() + Skew(r.vec());
  q.topRightCorner<3, 1>() = r.vec();
  q.bottomLeftCorner<1, 3>() = -r.vec().transpose();
  q(3, 3) = r.scalar();
  return q;
}

Mat3 RotationQuadraticForm(const Quaternion& r) {
  const double r1 = r[0], r2 = r[1], r3 = r[2], r4 = r[3];
  Mat3 m;
  m << r4 * r4 + r1 * r1 - r2 * r2 - r3 * r3, 2.0 * (r1 * r2 - r4 * r3),
      2.0 * (r1 * r3 + r4 * r2),
      2.0 * (r1 * r2 + r4 * r3), r4 * r4 - r1 * r1 + r2 * r2 - r3 * r3,
      2.0 * (r2 * r3 - r4 * r1),
      2.0 * (r1 * r3 - r4 * r2), 2.0 * (r2 * r3 + r4 * r1),
      r4 * r4 - r1 * r1 - r2 * r2 + r3 * r3;
  return m;
}

Mat3 RotationFromUnitQuat(const Quaternion& r) {
  RequireUnit(r);
  return RotationQuadraticForm(r);
}

EulerAngles EulerFromUnitQuat(const Quaternion& r) {
  RequireUnit(r);
  const double r1 = r[0], r2 = r[1], r3 = r[2], r4 = r[3];
  const double sin_psi = 2.0 * (r3 * r1 - r4 * r2);
  const double omega_num = 2.0 * (r4 * r3 + r2 * r1);
  const double omega_den = r4 * r4 + r1 * r1 - r2 * r2 - r3 * r3;
  // cos ψ from the first row of R; √(1 − sin²ψ) cannot resolve it near ±90°.
  if (std::hypot(omega_num, omega_den) < kGimbalThreshold) {
    throw Error(ErrorCode::kGimbalSingularity,
                "Euler angles are not separable (|cos psi| < 1e-12)");
  }
  EulerAngles a;
  a.epsilon = -std::atan2(2.0 * (r4 * r1 + r2 * r3),
                          r4 * r4 - r1 * r1 - r2 * r2 + r3 * r3);
  a.psi = std::asin(std::clamp(sin_psi, -1.0, 1.0));
  a.omega = -std::atan2(omega_num, omega_den);
  return a;
}

Quaternion UnitQuatFromEuler(const EulerAngles& angles) {
  // R = Rz(-ω) Ry(-ψ) Rx(-ε) reproduces the sign pattern of the extraction.
  using Eigen::AngleAxisd;
  const Eigen::Quaterniond q(AngleAxisd(-angles.omega, Eigen::Vector3d::UnitZ()) *
                             AngleAxisd(-angles.psi, Eigen::Vector3d::UnitY()) *
                             AngleAxisd(-angles.epsilon, Eigen::Vector3d::UnitX()));
  return Quaternion(q.x(), q.y(), q.z(), q.w());
}

Vec4 TranslationFromDualQuat4(const Quaternion& r, const Quaternion& s) {
  return 2.0 * WMatrix(r).transpose() * s.coeffs();
}

Vec3 TranslationFromDualQuat(const Quaternion& r, const Quaternion& s) {
  const double r1 = r[0], r2 = r[1], r3 = r[2], r4 = r[3];
  const double s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3];
  return Vec3(2.0 * (r2 * s3 - r1 * s4 - r3 * s2 + r4 * s1),
              2.0 * (r3 * s1 - r1 * s3 - r2 * s4 + r4 * s2),
              2.0 * (r1 * s2 - r2 * s1 - r3 * s4 + r4 * s3));
}

Quaternion DualPartFromTranslation(const Quaternion& r, const Vec3& t) {
  // W(r) is orthogonal for unit r, so W Wᵀ s = s.
  Vec4 padded;
  padded << t, 0.0;
  return Quaternion(0.5 * WMatrix(r) * padded);
}

Quaternion ScaledFromUnit(const Quaternion& r, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kNonPositiveScale, "scale factor must be positive");
  }
  return Quaternion(r.coeffs() * std::sqrt(lambda));
}

UnitAndScale UnitFromScaled(const Quaternion& qs) {
  const double norm = qs.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kZeroQuaternion, "cannot normalize a zero quaternion");
  }
  return {Quaternion(qs.coeffs() / norm), qs.squaredNorm()};
}

}  // namespace dqhelmert
