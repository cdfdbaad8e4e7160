// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics and the JSON report.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "intertrack/types.hpp"

namespace intertrack {

inline constexpr double kFScoreThreshold = 0.01;

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

/// Precision: fraction of pred within tau of gt; recall: the converse.
/// Throws EmptyCloud.
FScore fscore_detail(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau = kFScoreThreshold);
double fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau = kFScoreThreshold);

/// Similarity minimising sum |s R pred_i + t - gt_{c(i)}|^2 (Umeyama). An empty
/// correspondence pairs points by index. Throws DegenerateConfiguration for
/// fewer than three pairs or collinear input, LengthMismatch for bad maps.
SimilarityPose procrustes_align(std::span<const Vec3> pred, std::span<const Vec3> gt,
                                std::span<const std::size_t> correspondence = {});

enum class AlignMode { None, Joint, PerEntity };
AlignMode parse_align_mode(const std::string& name);
const char* to_string(AlignMode mode);

inline constexpr double kLambdaV2V = 100.0;

/// d_cd(pred, samples) + lambda * mean_i |pred_i - gt_i|^2. Throws LengthMismatch.
double registration_loss(std::span<const Vec3> pred_vertices, std::span<const Vec3> gt_vertices,
                         std::span<const Vec3> gt_samples, double lambda_v2v = kLambdaV2V);

struct RotationErrors {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  std::vector<double> per_frame_deg;
};

/// Geodesic angle of pred_i^T gt_i. Throws LengthMismatch.
RotationErrors rotation_error(std::span<const Mat3> pred, std::span<const Mat3> gt);

/// Mean over pred of the distance to the nearest gt point.
double mean_nearest_distance(std::span<const Vec3> pred, std::span<const Vec3> gt);
/// Mean |pred_i - gt_i|. Throws LengthMismatch.
double mean_vertex_distance(std::span<const Vec3> pred, std::span<const Vec3> gt);

/// 0.5 * (mean nearest distance a->b + b->a).
double chamfer_l1(std::span<const Vec3> a, std::span<const Vec3> b);

/// Mean |x_i - 2 x_{i-1} + x_{i-2}| over all points and interior frames.
double jitter(std::span<const std::vector<Vec3>> sequence);

/// Single similarity G mapping the reference canonical frame into the
/// predicted one, averaged over per-frame estimates pred_i^-1 ∘ ref_i.
/// Composing pred_i ∘ G removes the canonical gauge before pose errors.
SimilarityPose estimate_gauge(std::span<const SimilarityPose> pred, std::span<const SimilarityPose> ref);

struct PoseErrors {
  RotationErrors rotation;
  double translation_mean = 0.0;  ///< meters
};

/// Rotation and translation errors of pred_i ∘ G against ref_i.
PoseErrors pose_errors(std::span<const SimilarityPose> pred, std::span<const SimilarityPose> ref,
                       const SimilarityPose& gauge);

struct MetricReport {
  double human_fscore = 0.0;
  double object_fscore = 0.0;
  double combined_fscore = 0.0;
  double chamfer_cm = 0.0;
  double rot_mean_deg = 0.0;
  double rot_median_deg = 0.0;
  double trans_cm = 0.0;
  double jitter = 0.0;
  double runtime_s = 0.0;
};

/// Keys in fixed schema order.
std::string to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

}  // namespace intertrack
