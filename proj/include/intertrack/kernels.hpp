// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// variant; both produce bit-identical output because every output element is
// written by exactly one iteration and accumulated in a fixed order.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "intertrack/types.hpp"

namespace intertrack {

struct Neighbor {
  std::uint32_t index = 0;
  double sq_dist = std::numeric_limits<double>::infinity();
};

/// Exact O(n) scan; ties resolve to the lowest index.
Neighbor nearest_brute_force(std::span<const Vec3> reference, const Vec3& query);

/// Exact nearest-neighbour index over a fixed reference cloud. Uses a uniform
/// grid with cell size equal to the median nearest-neighbour spacing, and a
/// plain scan below kBruteForceBelow points. Ties resolve to the lowest index.
class NeighborIndex {
 public:
  static constexpr std::size_t kBruteForceBelow = 256;

  NeighborIndex() = default;
  explicit NeighborIndex(std::span<const Vec3> reference);

  Neighbor nearest(const Vec3& query) const;

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool uses_grid() const noexcept { return !cell_start_.empty(); }
  double cell_size() const noexcept { return cell_; }
  std::span<const Vec3> points() const noexcept { return points_; }

 private:
  void build_grid(double cell);
  std::array<int, 3> cell_of(const Vec3& p) const;
  Neighbor nearest_in_grid(const Vec3& q, std::int64_t exclude) const;

  std::vector<Vec3> points_;
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 0.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_items_;
};

void nearest_neighbors_serial(const NeighborIndex& index, std::span<const Vec3> queries,
                              std::span<Neighbor> out);
void nearest_neighbors_parallel(const NeighborIndex& index, std::span<const Vec3> queries,
                                std::span<Neighbor> out);
/// Parallel when called outside an OpenMP region, serial inside one.
std::vector<Neighbor> nearest_neighbors(const NeighborIndex& index, std::span<const Vec3> queries);

/// Projected point with its opacity weight.
struct Splat {
  double u = 0.0;
  double v = 0.0;
  double weight = 1.0;
};

/// Gaussian disc opacity with sigma = radius/2, tapered to reach zero with
/// zero slope at 2 radii so the mask is continuously differentiable:
/// alpha = w (g(q) - g(S)(1 - (q - S)/(2 sigma^2))) / (1 - g(S)(1 + S/(2 sigma^2)))
/// with q = du^2 + dv^2, S = (2 radius)^2 and g(q) = exp(-q / (2 sigma^2)).
inline double splat_alpha(double du, double dv, double radius_px, double weight) {
  const double q = du * du + dv * dv;
  const double support2 = 4.0 * radius_px * radius_px;
  if (q >= support2) return 0.0;
  const double h = 2.0 / (radius_px * radius_px);  // 1 / (2 sigma^2)
  const double gs = std::exp(-support2 * h);
  const double norm = 1.0 - gs * (1.0 + support2 * h);
  return weight * (std::exp(-q * h) - gs * (1.0 - (q - support2) * h)) / norm;
}

/// Coefficient c with d alpha / d u_splat = c (x - u_splat), and likewise for v.
inline double splat_alpha_slope(double du, double dv, double radius_px, double weight) {
  const double q = du * du + dv * dv;
  const double support2 = 4.0 * radius_px * radius_px;
  if (q >= support2) return 0.0;
  const double h = 2.0 / (radius_px * radius_px);
  const double gs = std::exp(-support2 * h);
  const double norm = 1.0 - gs * (1.0 + support2 * h);
  return 2.0 * h * weight * (std::exp(-q * h) - gs) / norm;
}

/// Per-pixel product of (1 - alpha) kept as a product over non-unit factors
/// plus a count of exactly-opaque contributions, so gradients stay exact.
struct Transmittance {
  int width = 0;
  int height = 0;
  std::vector<double> partial_product;
  std::vector<std::uint32_t> opaque_count;

  Transmittance(int w, int h)
      : width(w),
        height(h),
        partial_product(static_cast<std::size_t>(w) * h, 1.0),
        opaque_count(static_cast<std::size_t>(w) * h, 0) {}

  double opacity(std::size_t pixel) const {
    return opaque_count[pixel] > 0 ? 1.0 : 1.0 - partial_product[pixel];
  }
};

void splat_transmittance_serial(std::span<const Splat> splats, double radius_px, Transmittance& out);
void splat_transmittance_parallel(std::span<const Splat> splats, double radius_px, Transmittance& out);
void splat_transmittance(std::span<const Splat> splats, double radius_px, Transmittance& out);

/// Worker count used by the parallel kernels; honours INTERTRACK_THREADS.
int configure_threads_from_env();

}  // namespace intertrack
