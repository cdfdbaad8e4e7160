// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Procedural interaction sequences with exact ground truth.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intertrack/body_model.hpp"
#include "intertrack/bundle.hpp"
#include "intertrack/types.hpp"

namespace intertrack {

enum class ObjectKind { Box, Cylinder, LShape, Blob };
ObjectKind parse_object_kind(const std::string& name);
const char* to_string(ObjectKind kind);

struct TrajectoryConfig {
  double max_sweep_deg = 90.0;        ///< total rotation sweep cap
  double max_deg_per_frame = 1.4;     ///< further caps the sweep at this rate times T-1
  std::size_t rotation_controls = 2;  ///< control rotations of the geodesic spline
  Vec3 box_center{0.0, 0.0, 2.1};     ///< translation box (1 m^3 at most)
  Vec3 box_half{0.3, 0.2, 0.2};
  double max_speed = 0.01;            ///< meters per frame along the straight translation path
};

struct BodyMotionConfig {
  double amplitude = 0.3;  ///< radians, at most 0.6
  double min_period_s = 6.0;
  double max_period_s = 9.0;
  double fps = 15.0;
  double shape_range = 2.0;
  Vec3 root{0.0, 0.0, 2.4};
  double root_drift = 0.03;  ///< meters
};

struct SynthConfig {
  std::size_t frames = 64;
  double fps = 15.0;
  ObjectKind object = ObjectKind::LShape;
  std::size_t object_points = 512;
  std::size_t dense_points = 4096;
  std::size_t human_points = 768;
  double noise = 0.005;
  bool shuffle = true;
  double scale_jitter = 0.0;         ///< per-frame log-scale drawn from U(-j, j)
  double occluded_fraction = 0.0;    ///< fraction of frames given an occluder
  double occlusion_level = 0.7;      ///< minimum occluded share of the object in those frames
  double degraded_noise = 0.02;      ///< extra noise on hidden points of occluded frames
  bool contact = false;              ///< pin the right hand to an object face
  std::size_t contact_begin = 0;
  std::size_t contact_end = static_cast<std::size_t>(-1);
  double contact_offset = 0.005;
  std::size_t window = 16;           ///< rotation window length
  double window_noise_deg = 10.0;
  double human_pose_noise = 0.15;    ///< init perturbation per joint (rad)
  double human_translation_noise = 0.05;
  double human_shape_noise = 0.1;
  std::size_t template_vertices = kDefaultVertices;
  double splat_radius = 2.0;
  TrajectoryConfig trajectory;
  BodyMotionConfig body;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  std::vector<Vec3> canonical;        ///< dense, centred
  std::vector<SimilarityPose> poses;  ///< object poses
  std::vector<BodyParams> body;       ///< per-frame body parameters
  Camera camera;
  std::vector<bool> occluded;         ///< occluder scheduled in the frame
  std::vector<std::size_t> hand_vertices;  ///< pinned hand vertices (contact mode)
  std::size_t contact_point = 0;           ///< canonical index of the object face point
  FrameRange contact_frames{0, 0};
};

std::vector<Vec3> sample_object_surface(ObjectKind kind, std::size_t count, std::uint64_t seed);

std::vector<SimilarityPose> gen_trajectory(std::size_t frames, std::uint64_t seed, const TrajectoryConfig& cfg = {});

/// Control rotations used by gen_trajectory for the same arguments.
std::vector<Mat3> trajectory_controls(std::size_t frames, std::uint64_t seed, const TrajectoryConfig& cfg = {});

std::vector<BodyParams> gen_body_motion(const BodyModel& model, std::size_t frames, std::uint64_t seed,
                                        const BodyMotionConfig& cfg = {});

/// Per-window predictions: ground truth times a rotation of fixed magnitude
/// about a random axis, independent per window and frame.
std::vector<RotationWindow> simulate_window_predictions(std::span<const Mat3> gt, std::size_t window,
                                                        std::size_t stride, double noise_deg, std::uint64_t seed);

/// One prediction per frame from non-overlapping windows.
std::vector<Mat3> single_window_predictions(std::span<const RotationWindow> windows, std::size_t frames);

struct SynthResult {
  SequenceBundle bundle;
  GroundTruth truth;
};

SynthResult gen_sequence(const SynthConfig& cfg);

}  // namespace intertrack
