#pragma once

// Quaternion and dual-quaternion algebra used by the Helmert solvers.
//
// Component order is (q1, q2, q3, q4) everywhere: vector part first, scalar
// part last. Matrices follow the same convention, so W(r) and Q(r) act on
// 4-vectors laid out as [x y z 0].

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dqhelmert {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kGimbalThreshold = 1e-12;

class Quaternion {
 public:
  Quaternion() : q_(0.0, 0.0, 0.0, 1.0) {}
  Quaternion(double q1, double q2, double q3, double q4) : q_(q1, q2, q3, q4) {}
  explicit Quaternion(const Vec4& coeffs) : q_(coeffs) {}

  static Quaternion Identity() { return Quaternion(); }
  static Quaternion Zero() { return Quaternion(0.0, 0.0, 0.0, 0.0); }

  const Vec4& coeffs() const { return q_; }
  Vec4& coeffs() { return q_; }

  Vec3 vec() const { return q_.head<3>(); }
  double scalar() const { return q_[3]; }

  double operator[](int i) const { return q_[i]; }
  double& operator[](int i) { return q_[i]; }

  double dot(const Quaternion& other) const { return q_.dot(other.q_); }
  double squaredNorm() const { return q_.squaredNorm(); }
  double norm() const { return q_.norm(); }

  bool isFinite() const { return q_.allFinite(); }

 private:
  Vec4 q_;
};

// Rotation part r and dual part s. t = 2 W(r)^T s carries the translation.
struct DualQuaternion {
  Quaternion r;
  Quaternion s = Quaternion::Zero();

  // rᵀr = 1 and rᵀs = 0 within `tol`.
  bool isUnit(double tol = 1e-12) const;
};

struct EulerAngles {
  double epsilon = 0.0;  // about x [rad]
  double psi = 0.0;      // about y [rad]
  double omega = 0.0;    // about z [rad]
};

double QuatNorm(const Quaternion& q);

// C(v): skew(v) * u == v.cross(u).
Mat3 Skew(const Vec3& v);

Mat4 WMatrix(const Quaternion& r);
Mat4 QMatrix(const Quaternion& r);

// Quadratic form (r4² - qᵀq) I + 2(q qᵀ + r4 C(q)). Equals the 3x3 block of
// W(r)ᵀQ(r) for any r; it is a rotation only when ‖r‖ = 1 and ‖r‖² times a
// rotation otherwise.
Mat3 RotationQuadraticForm(const Quaternion& r);

// Throws kNotUnit unless |‖r‖ - 1| <= 1e-9.
Mat3 RotationFromUnitQuat(const Quaternion& r);

// Throws kNotUnit, or kGimbalSingularity when |cos ψ| < 1e-12.
EulerAngles EulerFromUnitQuat(const Quaternion& r);

// Unit quaternion whose rotation matrix matches the given Euler angles under
// EulerFromUnitQuat's convention.
Quaternion UnitQuatFromEuler(const EulerAngles& angles);

// First three components of 2 W(r)ᵀ s.
Vec3 TranslationFromDualQuat(const Quaternion& r, const Quaternion& s);

// Full 4-vector 2 W(r)ᵀ s; the last entry is 2 rᵀs.
Vec4 TranslationFromDualQuat4(const Quaternion& r, const Quaternion& s);

// s such that TranslationFromDualQuat(r, s) == t and rᵀs == 0, for unit r.
Quaternion DualPartFromTranslation(const Quaternion& r, const Vec3& t);

// q_s = r √λ.
Quaternion ScaledFromUnit(const Quaternion& r, double lambda);

struct UnitAndScale {
  Quaternion r;
  double lambda = 1.0;
};

// r = q_s / ‖q_s‖ and λ = ‖q_s‖². The sign of q_s is preserved.
UnitAndScale UnitFromScaled(const Quaternion& qs);

}  // namespace dqhelmert
