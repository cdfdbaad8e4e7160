// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Canonical rigid object shape with per-frame similarity poses, fitted to
// per-frame clouds and occlusion-aware object masks.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "intertrack/bundle.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

struct ObjectTrack {
  std::vector<Vec3> canonical;
  std::vector<SimilarityPose> poses;

  std::size_t size() const noexcept { return poses.size(); }
  std::vector<Vec3> posed(std::size_t frame) const { return apply_similarity(canonical, poses[frame]); }
};

/// Step count for sequences whose rotation estimates are unreliable.
inline constexpr int kLowQualityObjectSteps = 16000;

struct ObjectFitConfig {
  double lambda_cd = 10.0;
  double lambda_occ = 0.001;
  double lambda_acc_points = 0.2;
  double lambda_acc_rotation = 1000.0;
  double lambda_acc_translation = 200.0;
  double lambda_acc_scale = 1000.0;
  int steps = 6000;
  double learning_rate = 6e-4;
  double visibility_threshold = 0.5;
  int batch_frames = 64;
  double splat_radius = kDefaultSplatRadius;
  bool freeze_canonical = false;
  std::uint64_t seed = 0;
};

struct CanonicalInit {
  std::vector<Vec3> points;
  std::size_t frame = 0;
};

/// Cloud of a random frame with visibility >= threshold, centred and rotated
/// back by that frame's rotation: R_k^T (p - c). Throws NoVisibleFrame.
CanonicalInit init_canonical_shape(const SequenceBundle& bundle, std::span<const Mat3> rotations, double threshold,
                                   std::uint64_t seed);

struct SilhouetteResult {
  double value = 0.0;
  SoftMask grad;  ///< d value / d rendered
};

/// Mean of (rendered - object)^2 over pixels where human < 0.5; zero when
/// every pixel is occluded. Throws DimensionMismatch.
SilhouetteResult occlusion_silhouette_loss(const SoftMask& rendered, const SoftMask& object_mask,
                                           const SoftMask& human_mask);

struct PoseGrad {
  Mat3 rotation = Mat3::Zero();  ///< d loss / d R
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;
};

struct ObjectGrad {
  std::vector<Vec3> canonical;
  std::vector<PoseGrad> poses;
};

struct ObjectLossResult {
  double value = 0.0;
  double chamfer = 0.0;  ///< weighted
  double silhouette = 0.0;
  double acc_points = 0.0;
  double acc_rotation = 0.0;
  double acc_translation = 0.0;
  double acc_scale = 0.0;
  ObjectGrad grad;  ///< sized to the whole track; zero outside the range
};

/// Per-frame weighted chamfer and silhouette terms over `range` plus the four
/// acceleration terms (transformed points, rotations, translations, scales).
ObjectLossResult object_loss(const ObjectTrack& track, const CloudTargets& targets, const SequenceBundle& bundle,
                             const ObjectFitConfig& cfg, FrameRange range, bool with_grad = true,
                             const PointTerm& extra = {});
ObjectLossResult object_loss(const ObjectTrack& track, const CloudTargets& targets, const SequenceBundle& bundle,
                             const ObjectFitConfig& cfg, bool with_grad = true);

/// Per-frame object clouds of a bundle as chamfer targets.
CloudTargets object_targets(const SequenceBundle& bundle);

struct ObjectFitResult {
  ObjectTrack track;
  std::vector<double> loss_history;
  std::size_t init_frame = 0;
};

/// Initialises canonical shape, rotations, centroid translations and zero
/// log-scales, fits, then re-centres the canonical shape.
ObjectFitResult fit_object(const SequenceBundle& bundle, std::span<const Mat3> rotations_init,
                           const ObjectFitConfig& cfg);

/// Fits from a given track (template mode keeps its canonical shape when
/// cfg.freeze_canonical is set).
ObjectFitResult fit_object(const SequenceBundle& bundle, const ObjectTrack& init, const ObjectFitConfig& cfg);

/// Moves the canonical centroid to the origin without changing any posed cloud.
void recenter_canonical(ObjectTrack& track);

}  // namespace intertrack
