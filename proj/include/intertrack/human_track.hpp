// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sequence-level human fitting with one shared body shape.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "intertrack/body_model.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

struct HumanFrame {
  Eigen::VectorXd pose;  ///< 3K axis-angle
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;
};

struct HumanTrack {
  Eigen::VectorXd mean_shape;
  std::vector<HumanFrame> frames;

  std::size_t size() const noexcept { return frames.size(); }
  BodyParams params(std::size_t i) const;
  static HumanTrack from_params(std::span<const BodyParams> params);
};

struct HumanFitConfig {
  double lambda_cd = 100.0;
  double lambda_prior = 1e-5;
  double lambda_acc = 100.0;
  int steps = 2500;
  double learning_rate = 1e-3;
  int batch_frames = 256;
  std::uint64_t seed = 0;
};

/// Componentwise mean. Throws EmptyList.
Eigen::VectorXd mean_shape(std::span<const Eigen::VectorXd> shapes);

inline constexpr double kJointLimit = 2.5;

struct PriorResult {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Sum over non-root joints of |theta_j|^2 plus squared hinges beyond +-2.5 rad.
PriorResult pose_prior(const Eigen::VectorXd& pose);

struct HumanGrad {
  Eigen::VectorXd mean_shape;
  std::vector<HumanFrame> frames;
};

struct HumanLossResult {
  double value = 0.0;
  double chamfer = 0.0;       ///< weighted
  double prior = 0.0;         ///< weighted
  double acceleration = 0.0;  ///< weighted
  HumanGrad grad;             ///< sized to the whole track; zero outside the range
};

/// Weighted chamfer and prior per frame of `range`, plus acceleration of the
/// posed vertex clouds over the range (skipped below three frames).
HumanLossResult human_loss(const BodyModel& model, const HumanTrack& track, const CloudTargets& targets,
                           const HumanFitConfig& cfg, FrameRange range, bool with_grad = true,
                           const PointTerm& extra = {});
HumanLossResult human_loss(const BodyModel& model, const HumanTrack& track, const CloudTargets& targets,
                           const HumanFitConfig& cfg, bool with_grad = true);

struct HumanFitResult {
  HumanTrack track;
  std::vector<double> loss_history;
};

/// Adam over per-frame pose, translation and log-scale; the mean shape stays fixed.
HumanFitResult fit_human(const BodyModel& model, const CloudTargets& targets, const HumanTrack& init,
                         const HumanFitConfig& cfg);

}  // namespace intertrack
