// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable geometry shared by the fitting modules. Every function that
// returns a gradient computes it analytically; gradients are vector-Jacobian
// products with respect to the first argument unless noted.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "intertrack/kernels.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

// ---------------------------------------------------------------------------
// Chamfer distance
// ---------------------------------------------------------------------------

struct ChamferResult {
  double value = 0.0;
  std::vector<Vec3> grad;  ///< d value / d a
};

/// mean_i min_j |a_i - b_j|^2 + mean_j min_i |b_j - a_i|^2.
/// Nearest indices are held fixed when differentiating. Throws EmptyCloud.
ChamferResult chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b, bool with_grad = true);

/// Same, with a prebuilt index over b (fixed targets).
ChamferResult chamfer_distance(std::span<const Vec3> a, const NeighborIndex& b, bool with_grad = true);

/// Target clouds with nearest-neighbour indices built once.
class CloudTargets {
 public:
  CloudTargets() = default;
  explicit CloudTargets(std::vector<std::vector<Vec3>> clouds);

  std::size_t size() const noexcept { return index_.size(); }
  const NeighborIndex& operator[](std::size_t i) const { return index_[i]; }

 private:
  std::vector<NeighborIndex> index_;
};

/// Extra per-frame point term: returns its value and adds d/d points into grad.
using PointTerm = std::function<double(std::size_t frame, std::span<const Vec3> points, std::span<Vec3> grad)>;

// ---------------------------------------------------------------------------
// Acceleration (second temporal difference) loss
// ---------------------------------------------------------------------------

template <class T>
struct AccelerationResult {
  double value = 0.0;
  std::vector<T> grad;
};

/// sum_{i>=2} |x_i - 2 x_{i-1} + x_{i-2}|^2 (Frobenius for matrices).
/// Throws TooShort for fewer than three entries.
AccelerationResult<double> acceleration_loss(std::span<const double> seq);
AccelerationResult<Vec3> acceleration_loss(std::span<const Vec3> seq);
AccelerationResult<Mat3> acceleration_loss(std::span<const Mat3> seq);
/// Point-cloud sequence; every frame must hold the same number of points.
AccelerationResult<std::vector<Vec3>> acceleration_loss(std::span<const std::vector<Vec3>> seq);

// ---------------------------------------------------------------------------
// Similarity transform
// ---------------------------------------------------------------------------

std::vector<Vec3> apply_similarity(std::span<const Vec3> points, const SimilarityPose& pose);
PointCloud apply_similarity(const PointCloud& cloud, const SimilarityPose& pose);

struct SimilarityGrad {
  std::vector<Vec3> points;
  Mat3 rotation = Mat3::Zero();
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;
};

SimilarityGrad apply_similarity_backward(std::span<const Vec3> points, const SimilarityPose& pose,
                                         std::span<const Vec3> grad_out);

// ---------------------------------------------------------------------------
// Projection and soft rasterisation
// ---------------------------------------------------------------------------

struct Projection {
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;
};

/// Throws BehindCameraError listing every point with z <= 1e-6.
std::vector<Projection> project_points(std::span<const Vec3> points, const Camera& cam);

/// d(u, v) / d(x, y, z) at p.
Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& p, const Camera& cam);

inline constexpr double kDefaultSplatRadius = 2.0;

/// Pixel opacity 1 - prod(1 - alpha_i) of Gaussian splats. An empty cloud
/// gives an all-zero mask.
SoftMask rasterize_soft_mask(std::span<const Vec3> points, const Camera& cam, double radius_px,
                             std::span<const double> weights = {});
SoftMask rasterize_soft_mask(const PointCloud& cloud, const Camera& cam, double radius_px);

/// Gradient of sum(grad_mask * mask) with respect to the 3D points.
std::vector<Vec3> rasterize_soft_mask_backward(std::span<const Vec3> points, const Camera& cam,
                                               double radius_px, const SoftMask& grad_mask,
                                               std::span<const double> weights = {});

}  // namespace intertrack
