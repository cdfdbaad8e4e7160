// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rotation-sequence utilities: the rotation training objective, chordal
// rotation averaging, sliding-window smoothing and visibility ratios.

#pragma once

#include <span>
#include <vector>

#include "intertrack/bundle.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

struct WindowConfig {
  std::size_t train_window = 16;
  std::size_t inference_window = 64;
  std::size_t stride = 1;
};

/// sum_i sum_entries |pred_i - gt_i| + lambda_acc * L_acc(pred); the
/// acceleration part is skipped below three frames. Throws LengthMismatch.
double rotation_training_loss(std::span<const Mat3> pred, std::span<const Mat3> gt, double lambda_acc);

/// Weighted entrywise mean projected onto SO(3). Empty weights mean uniform.
/// Throws EmptyList, InvalidConfig (bad weights) or DegenerateMean.
Mat3 average_rotations(std::span<const Mat3> rotations, std::span<const double> weights = {});

/// Per-frame average over every window prediction containing that frame.
/// Throws UncoveredFrame.
std::vector<Mat3> smooth_rotations(std::span<const RotationWindow> windows, std::size_t frames);

/// Window start frames for windows of min(size, frames) frames at `stride`;
/// the last window always ends at the final frame.
std::vector<std::size_t> window_starts(std::size_t frames, std::size_t size, std::size_t stride);

struct OcclusionMasks {
  SoftMask object;     ///< binary: object pixels not hidden by a nearer human splat
  SoftMask human;      ///< binary: human pixels not hidden by a nearer object splat
  std::size_t object_alone = 0;  ///< object pixels rendered without the human
  std::size_t object_visible = 0;
};

/// Binary masks with depth-aware occlusion between two clouds. A pixel's depth
/// is the nearest depth of any splat whose truncated support covers it.
OcclusionMasks render_occlusion_masks(std::span<const Vec3> object, std::span<const Vec3> human, const Camera& cam,
                                      double radius_px);

/// Object pixels still visible with the human in front, divided by object
/// pixels rendered alone (both binarised at 0.5). A pixel is occluded when a
/// human splat covers it and the nearest human depth there is smaller than
/// the nearest object depth. Throws EmptyCloud for an empty object cloud.
double visibility_ratio(std::span<const Vec3> object, std::span<const Vec3> human, const Camera& cam,
                        double radius_px);

/// Same ratio with the occluder given as a binary mask of pixels where it is
/// in front of the object, such as a saved human mask.
double visibility_ratio(std::span<const Vec3> object, const SoftMask& occluder, const Camera& cam, double radius_px);

}  // namespace intertrack
