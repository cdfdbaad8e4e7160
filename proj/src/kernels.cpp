// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace intertrack {

namespace {

inline bool better(double d, std::uint32_t i, const Neighbor& best) {
  return d < best.sq_dist || (d == best.sq_dist && i < best.index);
}

// Cap on total grid cells relative to point count.
constexpr double kMaxCellsPerPoint = 8.0;
constexpr std::size_t kSpacingSamples = 64;

}  // namespace

Neighbor nearest_brute_force(std::span<const Vec3> reference, const Vec3& query) {
  Neighbor best;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = (reference[i] - query).squaredNorm();
    if (better(d, static_cast<std::uint32_t>(i), best)) best = {static_cast<std::uint32_t>(i), d};
  }
  return best;
}

NeighborIndex::NeighborIndex(std::span<const Vec3> reference)
    : points_(reference.begin(), reference.end()) {
  if (points_.size() < kBruteForceBelow) return;

  Vec3 lo = points_.front(), hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max((hi - lo).maxCoeff(), 1e-9);
  const double n = static_cast<double>(points_.size());

  // Provisional grid, then the median nearest-neighbour spacing of a
  // deterministic sample sets the final cell size.
  build_grid(extent / std::cbrt(n));
  std::vector<double> spacing;
  const std::size_t stride = std::max<std::size_t>(1, points_.size() / kSpacingSamples);
  for (std::size_t i = 0; i < points_.size() && spacing.size() < kSpacingSamples; i += stride) {
    const Neighbor nb = nearest_in_grid(points_[i], static_cast<std::int64_t>(i));
    spacing.push_back(std::sqrt(nb.sq_dist));
  }
  std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
  const double median = spacing[spacing.size() / 2];
  build_grid(std::max(median, 1e-3 * extent / std::cbrt(n)));
}

void NeighborIndex::build_grid(double cell) {
  Vec3 lo = points_.front(), hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double max_cells = kMaxCellsPerPoint * static_cast<double>(points_.size());
  for (;;) {
    double total = 1.0;
    for (int a = 0; a < 3; ++a) total *= std::floor((hi[a] - lo[a]) / cell) + 1.0;
    if (total <= max_cells) break;
    cell *= 1.25;
  }
  cell_ = cell;
  origin_ = lo;
  for (int a = 0; a < 3; ++a) dims_[a] = static_cast<int>(std::floor((hi[a] - lo[a]) / cell)) + 1;

  const std::size_t ncells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  cell_start_.assign(ncells + 1, 0);
  std::vector<std::uint32_t> cell_id(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto c = cell_of(points_[i]);
    cell_id[i] = static_cast<std::uint32_t>((static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0]);
    ++cell_start_[cell_id[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.assign(points_.size(), 0);
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) cell_items_[fill[cell_id[i]]++] = static_cast<std::uint32_t>(i);
}

std::array<int, 3> NeighborIndex::cell_of(const Vec3& p) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin_[a]) / cell_);
    c[a] = static_cast<int>(std::clamp(f, 0.0, static_cast<double>(dims_[a] - 1)));
  }
  return c;
}

Neighbor NeighborIndex::nearest_in_grid(const Vec3& q, std::int64_t exclude) const {
  const auto c0 = cell_of(q);
  const int max_r = std::max({dims_[0], dims_[1], dims_[2]});
  Neighbor best;
  auto scan_cell = [&](int x, int y, int z) {
    const std::size_t cid = (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
    for (std::uint32_t k = cell_start_[cid]; k < cell_start_[cid + 1]; ++k) {
      const std::uint32_t i = cell_items_[k];
      if (static_cast<std::int64_t>(i) == exclude) continue;
      const double d = (points_[i] - q).squaredNorm();
      if (better(d, i, best)) best = {i, d};
    }
  };
  for (int r = 0; r <= max_r; ++r) {
    const int z0 = std::max(c0[2] - r, 0), z1 = std::min(c0[2] + r, dims_[2] - 1);
    const int y0 = std::max(c0[1] - r, 0), y1 = std::min(c0[1] + r, dims_[1] - 1);
    const int x0 = std::max(c0[0] - r, 0), x1 = std::min(c0[0] + r, dims_[0] - 1);
    for (int z = z0; z <= z1; ++z) {
      const bool zface = std::abs(z - c0[2]) == r;
      for (int y = y0; y <= y1; ++y) {
        const bool yface = zface || std::abs(y - c0[1]) == r;
        if (yface) {
          for (int x = x0; x <= x1; ++x) scan_cell(x, y, z);
        } else {
          if (c0[0] - r >= 0) scan_cell(c0[0] - r, y, z);
          if (r > 0 && c0[0] + r < dims_[0]) scan_cell(c0[0] + r, y, z);
        }
      }
    }
    // Anything in shell r+1 or beyond is at least r cells away.
    const double bound = r * cell_;
    if (best.sq_dist < bound * bound) break;
  }
  return best;
}

Neighbor NeighborIndex::nearest(const Vec3& query) const {
  if (!uses_grid()) return nearest_brute_force(points_, query);
  return nearest_in_grid(query, -1);
}

void nearest_neighbors_serial(const NeighborIndex& index, std::span<const Vec3> queries,
                              std::span<Neighbor> out) {
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = index.nearest(queries[i]);
}

void nearest_neighbors_parallel(const NeighborIndex& index, std::span<const Vec3> queries,
                                std::span<Neighbor> out) {
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = index.nearest(queries[i]);
}

std::vector<Neighbor> nearest_neighbors(const NeighborIndex& index, std::span<const Vec3> queries) {
  std::vector<Neighbor> out(queries.size());
  if (omp_in_parallel() || queries.size() < 512) {
    nearest_neighbors_serial(index, queries, out);
  } else {
    nearest_neighbors_parallel(index, queries, out);
  }
  return out;
}

namespace {

struct PixelWindow {
  int x0, x1, y0, y1;
};

inline PixelWindow window_of(const Splat& s, double radius_px, int width, int height) {
  const double support = 2.0 * radius_px;
  PixelWindow w;
  w.x0 = std::max(0, static_cast<int>(std::ceil(s.u - support)));
  w.x1 = std::min(width - 1, static_cast<int>(std::floor(s.u + support)));
  w.y0 = std::max(0, static_cast<int>(std::ceil(s.v - support)));
  w.y1 = std::min(height - 1, static_cast<int>(std::floor(s.v + support)));
  return w;
}

inline bool finite_splat(const Splat& s) { return std::isfinite(s.u) && std::isfinite(s.v); }

inline void splat_row(const Splat& s, double radius_px, int y, int x0, int x1, Transmittance& out) {
  for (int x = x0; x <= x1; ++x) {
    const double a = splat_alpha(x - s.u, y - s.v, radius_px, s.weight);
    if (a <= 0.0) continue;
    const std::size_t p = static_cast<std::size_t>(y) * out.width + x;
    if (a >= 1.0) {
      ++out.opaque_count[p];
    } else {
      out.partial_product[p] *= 1.0 - a;
    }
  }
}

}  // namespace

void splat_transmittance_serial(std::span<const Splat> splats, double radius_px, Transmittance& out) {
  for (const auto& s : splats) {
    if (!finite_splat(s)) continue;
    const auto w = window_of(s, radius_px, out.width, out.height);
    for (int y = w.y0; y <= w.y1; ++y) splat_row(s, radius_px, y, w.x0, w.x1, out);
  }
}

void splat_transmittance_parallel(std::span<const Splat> splats, double radius_px, Transmittance& out) {
  // Bin splats by the rows they touch, preserving splat order within a row.
  std::vector<std::uint32_t> row_start(static_cast<std::size_t>(out.height) + 1, 0);
  for (const auto& s : splats) {
    if (!finite_splat(s)) continue;
    const auto w = window_of(s, radius_px, out.width, out.height);
    for (int y = w.y0; y <= w.y1; ++y) ++row_start[y + 1];
  }
  for (int y = 0; y < out.height; ++y) row_start[y + 1] += row_start[y];
  std::vector<std::uint32_t> row_items(row_start.back());
  std::vector<std::uint32_t> fill(row_start.begin(), row_start.end() - 1);
  for (std::size_t i = 0; i < splats.size(); ++i) {
    if (!finite_splat(splats[i])) continue;
    const auto w = window_of(splats[i], radius_px, out.width, out.height);
    for (int y = w.y0; y <= w.y1; ++y) row_items[fill[y]++] = static_cast<std::uint32_t>(i);
  }

#pragma omp parallel for schedule(dynamic, 4)
  for (int y = 0; y < out.height; ++y) {
    for (std::uint32_t k = row_start[y]; k < row_start[y + 1]; ++k) {
      const Splat& s = splats[row_items[k]];
      const auto w = window_of(s, radius_px, out.width, out.height);
      splat_row(s, radius_px, y, w.x0, w.x1, out);
    }
  }
}

void splat_transmittance(std::span<const Splat> splats, double radius_px, Transmittance& out) {
  if (omp_in_parallel() || splats.size() < 2048) {
    splat_transmittance_serial(splats, radius_px, out);
  } else {
    splat_transmittance_parallel(splats, radius_px, out);
  }
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("INTERTRACK_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // Ignore malformed values and keep the OpenMP default.
    }
  }
  return omp_get_max_threads();
}

}  // namespace intertrack
