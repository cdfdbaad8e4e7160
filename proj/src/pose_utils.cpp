// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/pose_utils.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

double rotation_training_loss(std::span<const Mat3> pred, std::span<const Mat3> gt, double lambda_acc) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::LengthMismatch, "prediction and ground truth lengths differ");
  double l1 = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) l1 += (pred[i] - gt[i]).cwiseAbs().sum();
  if (pred.size() < 3 || lambda_acc == 0.0) return l1;
  return l1 + lambda_acc * acceleration_loss(pred).value;
}

Mat3 average_rotations(std::span<const Mat3> rotations, std::span<const double> weights) {
  if (rotations.empty()) throw Error(ErrorCode::EmptyList, "cannot average an empty rotation list");
  if (!weights.empty() && weights.size() != rotations.size()) {
    throw Error(ErrorCode::LengthMismatch, "one weight per rotation is required");
  }
  Mat3 sum = Mat3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidConfig, "rotation weights must be non-negative");
    sum += w * rotations[i];
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::InvalidConfig, "rotation weights are all zero");
  return nearest_rotation(sum / total);
}

std::vector<Mat3> smooth_rotations(std::span<const RotationWindow> windows, std::size_t frames) {
  std::vector<Mat3> sum(frames, Mat3::Zero());
  std::vector<std::size_t> count(frames, 0);
  for (const auto& w : windows) {
    for (std::size_t k = 0; k < w.rotations.size() && w.start + k < frames; ++k) {
      sum[w.start + k] += w.rotations[k];
      ++count[w.start + k];
    }
  }
  std::vector<Mat3> out(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    if (count[i] == 0) throw Error(ErrorCode::UncoveredFrame, "no window covers frame " + std::to_string(i));
  }
#pragma omp parallel for schedule(static) if (frames > 256)
  for (std::size_t i = 0; i < frames; ++i) out[i] = nearest_rotation(sum[i] / static_cast<double>(count[i]));
  return out;
}

std::vector<std::size_t> window_starts(std::size_t frames, std::size_t size, std::size_t stride) {
  if (stride == 0) throw Error(ErrorCode::InvalidConfig, "window stride must be positive");
  std::vector<std::size_t> starts;
  if (frames == 0) return starts;
  const std::size_t w = std::min(size, frames);
  for (std::size_t s = 0; s + w <= frames; s += stride) starts.push_back(s);
  if (starts.back() + w < frames) starts.push_back(frames - w);
  return starts;
}

namespace {

// Nearest depth of any splat whose truncated support covers each pixel.
std::vector<double> depth_buffer(std::span<const Vec3> points, const Camera& cam, double radius) {
  std::vector<double> depth(static_cast<std::size_t>(cam.width) * cam.height, std::numeric_limits<double>::infinity());
  const auto proj = project_points(points, cam);
  const double reach = 2.0 * radius;
  for (const auto& p : proj) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(p.pixel.x() - reach)));
    const int x1 = std::min(cam.width - 1, static_cast<int>(std::floor(p.pixel.x() + reach)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(p.pixel.y() - reach)));
    const int y1 = std::min(cam.height - 1, static_cast<int>(std::floor(p.pixel.y() + reach)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double du = x - p.pixel.x(), dv = y - p.pixel.y();
        if (du * du + dv * dv > reach * reach) continue;
        double& d = depth[static_cast<std::size_t>(y) * cam.width + x];
        d = std::min(d, p.depth);
      }
    }
  }
  return depth;
}

}  // namespace

OcclusionMasks render_occlusion_masks(std::span<const Vec3> object, std::span<const Vec3> human, const Camera& cam,
                                      double radius_px) {
  OcclusionMasks m;
  m.object = SoftMask(cam.width, cam.height);
  m.human = SoftMask(cam.width, cam.height);
  const SoftMask obj = rasterize_soft_mask(object, cam, radius_px);
  const SoftMask hum = rasterize_soft_mask(human, cam, radius_px);
  const auto od = object.empty() ? std::vector<double>() : depth_buffer(object, cam, radius_px);
  const auto hd = human.empty() ? std::vector<double>() : depth_buffer(human, cam, radius_px);
  for (std::size_t p = 0; p < obj.size(); ++p) {
    const bool o = obj.values[p] >= 0.5;
    const bool h = hum.values[p] >= 0.5;
    m.object_alone += o;
    const bool object_front = o && (!h || od[p] <= hd[p]);
    const bool human_front = h && (!o || hd[p] < od[p]);
    m.object.values[p] = object_front ? 1.0 : 0.0;
    m.human.values[p] = human_front ? 1.0 : 0.0;
    m.object_visible += object_front;
  }
  return m;
}

double visibility_ratio(std::span<const Vec3> object, std::span<const Vec3> human, const Camera& cam,
                        double radius_px) {
  if (object.empty()) throw Error(ErrorCode::EmptyCloud, "visibility needs a non-empty object cloud");
  const auto m = render_occlusion_masks(object, human, cam, radius_px);
  if (m.object_alone == 0) return 0.0;
  if (human.empty()) return 1.0;
  return static_cast<double>(m.object_visible) / static_cast<double>(m.object_alone);
}

double visibility_ratio(std::span<const Vec3> object, const SoftMask& occluder, const Camera& cam, double radius_px) {
  if (object.empty()) throw Error(ErrorCode::EmptyCloud, "visibility needs a non-empty object cloud");
  if (occluder.width != cam.width || occluder.height != cam.height) {
    throw Error(ErrorCode::DimensionMismatch, "occluder mask does not match the camera size");
  }
  const auto m = render_occlusion_masks(object, {}, cam, radius_px);
  if (m.object_alone == 0) return 0.0;
  std::size_t visible = 0;
  for (std::size_t p = 0; p < m.object.values.size(); ++p) {
    if (m.object.values[p] >= 0.5 && occluder.values[p] < 0.5) ++visible;
  }
  return static_cast<double>(visible) / static_cast<double>(m.object_alone);
}

}  // namespace intertrack
