// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles: brute-force references, finite differences and random
// generators. Nothing here calls the code paths it is used to check.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "intertrack/types.hpp"

namespace intertrack::testing {

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline std::vector<Vec3> random_cloud(std::mt19937_64& rng, std::size_t n, double scale = 1.0,
                                      const Vec3& offset = Vec3::Zero()) {
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = random_vec(rng, scale) + offset;
  return pts;
}

/// Direct O(n m) nearest squared distance.
inline double brute_nearest_sq(std::span<const Vec3> ref, const Vec3& q, std::size_t* index = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = (ref[i] - q).squaredNorm();
    if (d < best) {
      best = d;
      bi = i;
    }
  }
  if (index) *index = bi;
  return best;
}

inline double brute_chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  double sa = 0.0, sb = 0.0;
  for (const auto& p : a) sa += brute_nearest_sq(b, p);
  for (const auto& q : b) sb += brute_nearest_sq(a, q);
  return sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size());
}

/// Central differences of a scalar function of a flat parameter vector.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = xp[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Norm-wise relative error with a tiny absolute floor for vanishing gradients.
inline double relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-8});
  return (analytic - numeric).norm() / scale;
}

inline Eigen::VectorXd flatten(std::span<const Vec3> pts) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(3 * pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) x.segment<3>(static_cast<Eigen::Index>(3 * i)) = pts[i];
  return x;
}

inline std::vector<Vec3> unflatten(const Eigen::VectorXd& x) {
  std::vector<Vec3> pts(static_cast<std::size_t>(x.size() / 3));
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = x.segment<3>(static_cast<Eigen::Index>(3 * i));
  return pts;
}

/// Splat opacity at pixel distance d: Gaussian minus its first-order expansion
/// in d^2 at the cut-off, rescaled to 1 at the centre.
inline double taper_oracle(double d, double sigma, double cut) {
  if (d >= cut) return 0.0;
  auto g = [&](double r) { return std::exp(-r * r / (2.0 * sigma * sigma)); };
  auto line = [&](double r) { return g(cut) * (1.0 + (cut * cut - r * r) / (2.0 * sigma * sigma)); };
  return (g(d) - line(d)) / (g(0.0) - line(0.0));
}

inline Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }
inline Mat3 rot_axis(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

inline double deg(double rad) { return rad * 180.0 / M_PI; }
inline double rad(double deg) { return deg * M_PI / 180.0; }

}  // namespace intertrack::testing
