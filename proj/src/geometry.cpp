// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/geometry.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "intertrack/error.hpp"

namespace intertrack {

ChamferResult chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b, bool with_grad) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer_distance needs two non-empty clouds");
  return chamfer_distance(a, NeighborIndex(b), with_grad);
}

ChamferResult chamfer_distance(std::span<const Vec3> a, const NeighborIndex& b_index, bool with_grad) {
  if (a.empty() || b_index.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer_distance needs two non-empty clouds");
  const auto b = b_index.points();
  const NeighborIndex a_index(a);
  const auto a_to_b = nearest_neighbors(b_index, a);
  const auto b_to_a = nearest_neighbors(a_index, b);

  const double inv_a = 1.0 / static_cast<double>(a.size());
  const double inv_b = 1.0 / static_cast<double>(b.size());
  double sum_a = 0.0, sum_b = 0.0;
  for (const auto& nb : a_to_b) sum_a += nb.sq_dist;
  for (const auto& nb : b_to_a) sum_b += nb.sq_dist;

  ChamferResult out;
  out.value = sum_a * inv_a + sum_b * inv_b;
  if (!with_grad) return out;

  out.grad.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.grad[i] = 2.0 * inv_a * (a[i] - b[a_to_b[i].index]);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const std::uint32_t i = b_to_a[j].index;
    out.grad[i] += 2.0 * inv_b * (a[i] - b[j]);
  }
  return out;
}

namespace {

inline double sq_norm(double x) { return x * x; }
inline double sq_norm(const Vec3& x) { return x.squaredNorm(); }
inline double sq_norm(const Mat3& x) { return x.squaredNorm(); }

template <class T>
T zero_like(const T&) {
  if constexpr (std::is_same_v<T, double>) {
    return 0.0;
  } else {
    return T::Zero();
  }
}

template <class T>
AccelerationResult<T> acceleration_impl(std::span<const T> x) {
  if (x.size() < 3) throw Error(ErrorCode::TooShort, "acceleration loss needs at least 3 frames");
  AccelerationResult<T> out;
  out.grad.assign(x.size(), zero_like(x[0]));
  for (std::size_t i = 2; i < x.size(); ++i) {
    const T d = x[i] - 2.0 * x[i - 1] + x[i - 2];
    out.value += sq_norm(d);
    out.grad[i] += 2.0 * d;
    out.grad[i - 1] -= 4.0 * d;
    out.grad[i - 2] += 2.0 * d;
  }
  return out;
}

}  // namespace

AccelerationResult<double> acceleration_loss(std::span<const double> seq) { return acceleration_impl(seq); }
AccelerationResult<Vec3> acceleration_loss(std::span<const Vec3> seq) { return acceleration_impl(seq); }
AccelerationResult<Mat3> acceleration_loss(std::span<const Mat3> seq) { return acceleration_impl(seq); }

AccelerationResult<std::vector<Vec3>> acceleration_loss(std::span<const std::vector<Vec3>> seq) {
  if (seq.size() < 3) throw Error(ErrorCode::TooShort, "acceleration loss needs at least 3 frames");
  const std::size_t n = seq[0].size();
  for (const auto& f : seq) {
    if (f.size() != n) throw Error(ErrorCode::LengthMismatch, "point sequences must have equal sizes per frame");
  }
  AccelerationResult<std::vector<Vec3>> out;
  out.grad.assign(seq.size(), std::vector<Vec3>(n, Vec3::Zero()));
  for (std::size_t i = 2; i < seq.size(); ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3 d = seq[i][k] - 2.0 * seq[i - 1][k] + seq[i - 2][k];
      out.value += d.squaredNorm();
      out.grad[i][k] += 2.0 * d;
      out.grad[i - 1][k] -= 4.0 * d;
      out.grad[i - 2][k] += 2.0 * d;
    }
  }
  return out;
}

std::vector<Vec3> apply_similarity(std::span<const Vec3> points, const SimilarityPose& pose) {
  std::vector<Vec3> out(points.size());
  const double s = pose.scale();
  const Mat3 sR = s * pose.rotation;
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = sR * points[i] + pose.translation;
  return out;
}

PointCloud apply_similarity(const PointCloud& cloud, const SimilarityPose& pose) {
  PointCloud out(apply_similarity(cloud.view(), pose));
  out.weights = cloud.weights;
  return out;
}

SimilarityGrad apply_similarity_backward(std::span<const Vec3> points, const SimilarityPose& pose,
                                         std::span<const Vec3> grad_out) {
  if (points.size() != grad_out.size()) throw Error(ErrorCode::LengthMismatch, "gradient size differs from point count");
  SimilarityGrad g;
  g.points.resize(points.size());
  const double s = pose.scale();
  const Mat3 sRt = s * pose.rotation.transpose();
  Mat3 outer = Mat3::Zero();
  double scale_term = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    g.points[i] = sRt * grad_out[i];
    outer += grad_out[i] * points[i].transpose();
    g.translation += grad_out[i];
    scale_term += grad_out[i].dot(pose.rotation * points[i]);
  }
  g.rotation = s * outer;
  g.log_scale = s * scale_term;
  return g;
}

std::vector<Projection> project_points(std::span<const Vec3> points, const Camera& cam) {
  std::vector<Projection> out(points.size());
  std::vector<std::size_t> behind;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    if (!(p.z() > 1e-6)) {
      behind.push_back(i);
      continue;
    }
    out[i].pixel = Vec2(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
    out[i].depth = p.z();
  }
  if (!behind.empty()) throw BehindCameraError(std::move(behind));
  return out;
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& p, const Camera& cam) {
  const double iz = 1.0 / p.z();
  Eigen::Matrix<double, 2, 3> J;
  J << cam.fx * iz, 0.0, -cam.fx * p.x() * iz * iz,  //
      0.0, cam.fy * iz, -cam.fy * p.y() * iz * iz;
  return J;
}

namespace {

std::vector<Splat> make_splats(std::span<const Vec3> points, const Camera& cam, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != points.size()) {
    throw Error(ErrorCode::LengthMismatch, "weights must match point count");
  }
  const auto proj = project_points(points, cam);
  std::vector<Splat> splats(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    splats[i] = {proj[i].pixel.x(), proj[i].pixel.y(), weights.empty() ? 1.0 : weights[i]};
  }
  return splats;
}

void check_radius(double radius_px) {
  if (!(radius_px > 0.0)) throw Error(ErrorCode::InvalidConfig, "splat radius must be positive");
}

}  // namespace

SoftMask rasterize_soft_mask(std::span<const Vec3> points, const Camera& cam, double radius_px,
                             std::span<const double> weights) {
  check_radius(radius_px);
  SoftMask mask(cam.width, cam.height, 0.0);
  if (points.empty()) return mask;
  const auto splats = make_splats(points, cam, weights);
  Transmittance t(cam.width, cam.height);
  splat_transmittance(splats, radius_px, t);
  for (std::size_t p = 0; p < mask.size(); ++p) mask.values[p] = t.opacity(p);
  return mask;
}

SoftMask rasterize_soft_mask(const PointCloud& cloud, const Camera& cam, double radius_px) {
  return rasterize_soft_mask(cloud.view(), cam, radius_px, cloud.weights);
}

std::vector<Vec3> rasterize_soft_mask_backward(std::span<const Vec3> points, const Camera& cam,
                                               double radius_px, const SoftMask& grad_mask,
                                               std::span<const double> weights) {
  check_radius(radius_px);
  if (grad_mask.width != cam.width || grad_mask.height != cam.height) {
    throw Error(ErrorCode::DimensionMismatch, "mask gradient does not match the camera image size");
  }
  std::vector<Vec3> grad(points.size(), Vec3::Zero());
  if (points.empty()) return grad;
  const auto splats = make_splats(points, cam, weights);
  Transmittance t(cam.width, cam.height);
  splat_transmittance(splats, radius_px, t);

  const double support = 2.0 * radius_px;
  const auto n = static_cast<std::int64_t>(points.size());

  auto point_grad = [&](std::int64_t i) {
    const Splat& s = splats[i];
    const int x0 = std::max(0, static_cast<int>(std::ceil(s.u - support)));
    const int x1 = std::min(cam.width - 1, static_cast<int>(std::floor(s.u + support)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(s.v - support)));
    const int y1 = std::min(cam.height - 1, static_cast<int>(std::floor(s.v + support)));
    Vec2 g_uv = Vec2::Zero();
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double a = splat_alpha(x - s.u, y - s.v, radius_px, s.weight);
        if (a <= 0.0) continue;
        const std::size_t p = static_cast<std::size_t>(y) * cam.width + x;
        const double g = grad_mask.values[p];
        if (g == 0.0) continue;
        double others = 0.0;  // prod_{j != i} (1 - alpha_j)
        if (a >= 1.0) {
          others = t.opaque_count[p] == 1 ? t.partial_product[p] : 0.0;
        } else if (t.opaque_count[p] == 0) {
          others = t.partial_product[p] / (1.0 - a);
        }
        const double g_alpha = g * others * splat_alpha_slope(x - s.u, y - s.v, radius_px, s.weight);
        g_uv.x() += g_alpha * (x - s.u);
        g_uv.y() += g_alpha * (y - s.v);
      }
    }
    grad[i] = projection_jacobian(points[i], cam).transpose() * g_uv;
  };

  if (omp_in_parallel() || points.size() < 2048) {
    for (std::int64_t i = 0; i < n; ++i) point_grad(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) point_grad(i);
  }
  return grad;
}

CloudTargets::CloudTargets(std::vector<std::vector<Vec3>> clouds) {
  index_.reserve(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].empty()) throw Error(ErrorCode::EmptyCloud, "target cloud of frame " + std::to_string(i) + " is empty");
    index_.emplace_back(clouds[i]);
  }
}

}  // namespace intertrack
