// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// In-memory form of an input sequence: per-frame reconstructions, masks,
// rotation estimates and visibility ratios.

#pragma once

#include <optional>
#include <vector>

#include "intertrack/body_model.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

struct FrameData {
  PointCloud human;
  PointCloud object;
  SoftMask object_mask;
  SoftMask human_mask;
  Mat3 rotation_estimate = Mat3::Identity();
  double visibility = 1.0;
};

/// Rotation predictions of one sliding window, starting at frame `start`.
struct RotationWindow {
  std::size_t start = 0;
  std::vector<Mat3> rotations;
};

struct SequenceBundle {
  Camera camera;
  std::vector<FrameData> frames;
  std::vector<RotationWindow> rotation_windows;  ///< optional raw window predictions
  std::optional<BodyTemplate> body_template;      ///< default template when absent
  std::vector<BodyParams> human_init;             ///< optional per-frame body initialisation

  std::size_t size() const noexcept { return frames.size(); }
};

}  // namespace intertrack
