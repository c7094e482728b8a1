#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "dqhelmert/dqhelmert.hpp"

namespace dqhelmert::testing {

inline constexpr double kDeg = 180.0 / std::numbers::pi;

inline Quaternion RandomUnitQuat(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec4 q(g(rng), g(rng), g(rng), g(rng));
  return Quaternion(q.normalized());
}

// Rotation by a uniformly drawn angle in [0, max_angle] about a random axis,
// returned with r4 >= 0.
inline Quaternion RandomRotation(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, max_angle);
  const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
  const double half = 0.5 * u(rng);
  const Vec3 q = std::sin(half) * axis;
  return Quaternion(q[0], q[1], q[2], std::cos(half));
}

struct Planted {
  Problem problem;
  double lambda = 1.0;
  Quaternion r;
  Vec3 t = Vec3::Zero();
};

struct SyntheticOptions {
  int n = 8;
  double max_angle = std::numbers::pi / 2;
  double lambda_min = 0.5;
  double lambda_max = 3.0;
  double extent = 500.0;     // half-width of the source point cloud [m]
  double offset = 1000.0;    // distance of the cloud centre from the origin
  double noise = 0.0;        // standard deviation of coordinate noise [m]
  bool random_weights = false;
  Dimension dim = Dimension::k3D;
};

// Target = λ R source + t, optionally perturbed on both frames.
inline Planted MakeSynthetic(std::uint64_t seed, const SyntheticOptions& opt) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> lam(opt.lambda_min, opt.lambda_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.5, 4.0);

  Planted out;
  const bool planar = opt.dim == Dimension::k2D;
  if (planar) {
    std::uniform_real_distribution<double> ang(-opt.max_angle, opt.max_angle);
    const double a = 0.5 * ang(rng);
    out.r = Quaternion(0.0, 0.0, std::sin(a), std::cos(a));
  } else {
    out.r = RandomRotation(rng, opt.max_angle);
  }
  out.lambda = lam(rng);
  out.t = Vec3(u(rng), u(rng), planar ? 0.0 : u(rng)) * opt.offset;
  const Vec3 centre = Vec3(u(rng), u(rng), planar ? 0.0 : u(rng)) * opt.offset;
  const Mat3 rot = RotationQuadraticForm(out.r);

  weights::PerPointScalar w;
  for (int i = 0; i < opt.n; ++i) {
    Vec3 x = centre + Vec3(u(rng), u(rng), planar ? 0.0 : u(rng)) * opt.extent;
    Vec3 X = out.lambda * rot * x + out.t;
    if (opt.noise > 0.0) {
      for (int k = 0; k < (planar ? 2 : 3); ++k) {
        x[k] += opt.noise * noise(rng);
        X[k] += opt.noise * noise(rng);
      }
    }
    out.problem.points.push_back({"P" + std::to_string(i + 1), x, X});
    w.weights.push_back(opt.random_weights ? wdist(rng) : 1.0);
  }
  out.problem.weights.kind = w;
  out.problem.dim = opt.dim;
  return out;
}

// Central differences of a vector function.
inline DenseMatrix NumericJacobian(
    const std::function<DenseVector(const DenseVector&)>& f,
    const DenseVector& x, double rel_step = 1e-6) {
  const DenseVector f0 = f(x);
  DenseMatrix j(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x[k]));
    DenseVector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

// Largest entrywise error, each column measured relative to the largest
// magnitude in that column of the reference.
inline double MaxColumnRelativeError(const DenseMatrix& analytic,
                                     const DenseMatrix& reference) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < reference.cols(); ++c) {
    const double scale = std::max(reference.col(c).cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst,
                     (analytic.col(c) - reference.col(c)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// One unit in the last digit of a number as printed, e.g. "9.0327" -> 1e-4,
// "7.43265e-7" -> 1e-12.
inline double LastDigitUnit(std::string_view printed) {
  int exponent = 0;
  const auto e = printed.find_first_of("eE");
  if (e != std::string_view::npos) {
    exponent = std::stoi(std::string(printed.substr(e + 1)));
    printed = printed.substr(0, e);
  }
  const auto dot = printed.find('.');
  const int decimals =
      dot == std::string_view::npos ? 0 : static_cast<int>(printed.size() - dot - 1);
  return std::pow(10.0, exponent - decimals);
}

inline double Printed(std::string_view printed) {
  return std::stod(std::string(printed));
}

// |value − printed| within one unit of the last printed digit.
inline bool MatchesPrinted(double value, std::string_view printed) {
  return std::abs(value - Printed(printed)) <= LastDigitUnit(printed) * (1.0 + 1e-9);
}

// |value − reference| within one unit of the third significant digit.
inline bool MatchesThreeDigits(double value, double reference) {
  if (reference == 0.0) return value == 0.0;
  const double unit =
      std::pow(10.0, std::floor(std::log10(std::abs(reference))) - 2.0);
  return std::abs(value - reference) <= unit * (1.0 + 1e-9);
}

// |a − b| ≤ tol · max(1, |a|, |b|).
inline bool Close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Classical asymmetric Helmert fit: minimizes Σ wᵢ‖Xᵢ − λR xᵢ − t‖² in closed
// form from the weighted cross-covariance (Umeyama).
struct HelmertFit {
  double lambda = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

inline HelmertFit WeightedUmeyama(const std::vector<Vec3>& x,
                                  const std::vector<Vec3>& X,
                                  const std::vector<double>& w) {
  double wsum = 0.0;
  Vec3 mx = Vec3::Zero(), mX = Vec3::Zero();
  for (size_t i = 0; i < x.size(); ++i) {
    wsum += w[i];
    mx += w[i] * x[i];
    mX += w[i] * X[i];
  }
  mx /= wsum;
  mX /= wsum;
  Mat3 cov = Mat3::Zero();
  double var_x = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    cov += w[i] * (X[i] - mX) * (x[i] - mx).transpose();
    var_x += w[i] * (x[i] - mx).squaredNorm();
  }
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2, 2) = -1.0;
  }
  HelmertFit fit;
  fit.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  fit.lambda = (svd.singularValues().asDiagonal() * s).trace() / var_x;
  fit.t = mX - fit.lambda * fit.rotation * mx;
  return fit;
}

}  // namespace dqhelmert::testing
