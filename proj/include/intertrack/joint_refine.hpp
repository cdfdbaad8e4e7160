// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "intertrack/body_model.hpp"
#include "intertrack/bundle.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/human_track.hpp"
#include "intertrack/object_track.hpp"

namespace intertrack {

/// Human point `human` lies within the threshold of object point `object`.
struct ContactMatch {
  std::size_t human = 0;
  std::size_t object = 0;
  double distance = 0.0;
};

/// Body vertex index paired with a canonical object point index.
struct ContactPair {
  std::size_t human_vertex = 0;
  std::size_t object_point = 0;
};

struct FrameContacts {
  std::vector<ContactPair> pairs;
  std::vector<Vec3> human_locations;   ///< upstream human contact points
  std::vector<Vec3> object_locations;  ///< upstream object contact points
};

struct ContactSet {
  std::vector<FrameContacts> frames;

  std::size_t pair_count() const noexcept;
  bool empty() const noexcept { return pair_count() == 0; }
  /// Throws LengthMismatch if any index is outside the given sizes.
  void validate(std::size_t vertices, std::size_t object_points) const;
};

struct JointConfig {
  double delta = 0.02;
  double lambda_contact = 10.0;
  int steps = 2500;
  double learning_rate_human = 1e-3;
  double learning_rate_object = 6e-4;
  int batch_frames = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Every human point closer than `delta` to the object, paired with its
/// nearest object point (lowest index on ties).
std::vector<ContactMatch> find_contacts(std::span<const Vec3> human, std::span<const Vec3> object, double delta);

/// Maps upstream contact locations to the nearest optimised body vertex and
/// the nearest posed canonical point.
FrameContacts transfer_contacts(std::span<const ContactMatch> contacts, std::span<const Vec3> upstream_human,
                                std::span<const Vec3> upstream_object, std::span<const Vec3> optimized_human,
                                std::span<const Vec3> optimized_object);

/// Discovers contacts on the bundle clouds of every frame and transfers them
/// to the given tracks.
ContactSet build_contacts(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                          const SequenceBundle& bundle, double delta);

/// Weighted squared contact distance of one frame and its gradients.
struct ContactTerm {
  double value = 0.0;
  std::vector<Vec3> human_grad;   ///< per body vertex
  std::vector<Vec3> object_grad;  ///< per posed object point
};

ContactTerm contact_term(const FrameContacts& contacts, std::span<const Vec3> human_vertices,
                         std::span<const Vec3> object_points, double lambda_contact);

/// Mean distance between paired body vertices and posed object points.
double mean_contact_gap(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                        const ContactSet& contacts);

struct JointLossResult {
  double value = 0.0;
  double contact = 0.0;  ///< weighted
  HumanLossResult human;
  ObjectLossResult object;
};

struct JointTargets {
  CloudTargets human;
  CloudTargets object;
};

JointTargets joint_targets(const SequenceBundle& bundle);

JointLossResult joint_loss(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                           const ContactSet& contacts, const JointTargets& targets, const SequenceBundle& bundle,
                           const HumanFitConfig& cfg_h, const ObjectFitConfig& cfg_o, const JointConfig& cfg_j,
                           FrameRange range, bool with_grad);
JointLossResult joint_loss(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                           const ContactSet& contacts, const JointTargets& targets, const SequenceBundle& bundle,
                           const HumanFitConfig& cfg_h, const ObjectFitConfig& cfg_o, const JointConfig& cfg_j,
                           bool with_grad = true);

struct JointRefineResult {
  HumanTrack human;
  ObjectTrack object;
  ContactSet contacts;
  std::vector<double> loss_history;
};

/// Fine-tunes body poses and object rotations only. Contacts are found once
/// from the tracks passed in.
JointRefineResult refine_joint(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                               const SequenceBundle& bundle, const HumanFitConfig& cfg_h,
                               const ObjectFitConfig& cfg_o, const JointConfig& cfg_j);

}  // namespace intertrack
