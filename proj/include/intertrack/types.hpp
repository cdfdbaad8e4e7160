// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace intertrack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// First two columns of a rotation matrix, column-major: (c0x c0y c0z c1x c1y c1z).
using Rot6D = Eigen::Matrix<double, 6, 1>;

/// Ordered list of 3D points in meters. Weights, when present, scale the
/// per-point splat opacity and must match the point count.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> weights;

  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_weights() const noexcept { return !weights.empty(); }
  std::span<const Vec3> view() const noexcept { return points; }

  Vec3 centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& p : points) c += p;
    return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
  }
};

/// p -> exp(log_scale) * R p + t
struct SimilarityPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;

  double scale() const { return std::exp(log_scale); }
  Vec3 apply(const Vec3& p) const { return scale() * (rotation * p) + translation; }

  SimilarityPose inverse() const {
    SimilarityPose inv;
    inv.rotation = rotation.transpose();
    inv.log_scale = -log_scale;
    inv.translation = -inv.scale() * (inv.rotation * translation);
    return inv;
  }

  /// (this ∘ other)(p) = this(other(p))
  SimilarityPose compose(const SimilarityPose& other) const {
    SimilarityPose out;
    out.rotation = rotation * other.rotation;
    out.log_scale = log_scale + other.log_scale;
    out.translation = scale() * (rotation * other.translation) + translation;
    return out;
  }
};

/// Pinhole camera looking down +z; pixel (x, y) is centred at integer coordinates.
struct Camera {
  double fx = 160.0;
  double fy = 160.0;
  double cx = 64.0;
  double cy = 64.0;
  int width = 128;
  int height = 128;
};

/// Row-major height x width grid of opacities in [0, 1].
struct SoftMask {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  SoftMask() = default;
  SoftMask(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const noexcept { return values.size(); }
  bool same_shape(const SoftMask& o) const { return width == o.width && height == o.height; }
};

/// Half-open frame interval used for minibatch windows.
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

}  // namespace intertrack
