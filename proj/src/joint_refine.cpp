// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/joint_refine.hpp"

#include <cmath>
#include <random>
#include <string>

#include "intertrack/adam.hpp"
#include "intertrack/error.hpp"
#include "intertrack/kernels.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

std::size_t ContactSet::pair_count() const noexcept {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.pairs.size();
  return n;
}

void ContactSet::validate(std::size_t vertices, std::size_t object_points) const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (const auto& p : frames[i].pairs) {
      if (p.human_vertex >= vertices || p.object_point >= object_points) {
        throw Error(ErrorCode::LengthMismatch, "contact index out of range at frame " + std::to_string(i));
      }
    }
  }
}

void JointConfig::validate() const {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidConfig, "contact threshold must be positive");
  if (!(lambda_contact >= 0.0)) throw Error(ErrorCode::InvalidConfig, "contact weight must be non-negative");
  if (steps < 0) throw Error(ErrorCode::InvalidConfig, "step count must be non-negative");
  if (!(learning_rate_human > 0.0) || !(learning_rate_object > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "learning rates must be positive");
  }
}

std::vector<ContactMatch> find_contacts(std::span<const Vec3> human, std::span<const Vec3> object, double delta) {
  if (human.empty() || object.empty()) throw Error(ErrorCode::EmptyCloud, "contact discovery needs two non-empty clouds");
  const NeighborIndex index(object);
  const auto nn = nearest_neighbors(index, human);
  std::vector<ContactMatch> out;
  for (std::size_t j = 0; j < nn.size(); ++j) {
    const double d = std::sqrt(nn[j].sq_dist);
    if (d < delta) out.push_back({j, nn[j].index, d});
  }
  return out;
}

FrameContacts transfer_contacts(std::span<const ContactMatch> contacts, std::span<const Vec3> upstream_human,
                                std::span<const Vec3> upstream_object, std::span<const Vec3> optimized_human,
                                std::span<const Vec3> optimized_object) {
  FrameContacts out;
  if (contacts.empty()) return out;
  if (optimized_human.empty() || optimized_object.empty()) {
    throw Error(ErrorCode::EmptyCloud, "contact transfer needs non-empty optimised geometry");
  }
  for (const auto& c : contacts) {
    if (c.human >= upstream_human.size() || c.object >= upstream_object.size()) {
      throw Error(ErrorCode::LengthMismatch, "contact refers to a point outside the upstream clouds");
    }
    out.human_locations.push_back(upstream_human[c.human]);
    out.object_locations.push_back(upstream_object[c.object]);
  }
  const auto h = nearest_neighbors(NeighborIndex(optimized_human), out.human_locations);
  const auto o = nearest_neighbors(NeighborIndex(optimized_object), out.object_locations);
  out.pairs.reserve(contacts.size());
  for (std::size_t k = 0; k < contacts.size(); ++k) out.pairs.push_back({h[k].index, o[k].index});
  return out;
}

ContactSet build_contacts(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                          const SequenceBundle& bundle, double delta) {
  const std::size_t T = bundle.size();
  if (human.size() != T || object.size() != T) {
    throw Error(ErrorCode::LengthMismatch, "tracks and bundle must have the same frame count");
  }
  ContactSet set;
  set.frames.resize(T);
#pragma omp parallel for schedule(dynamic) if (T > 1)
  for (std::size_t i = 0; i < T; ++i) {
    const auto& f = bundle.frames[i];
    const auto matches = find_contacts(f.human.points, f.object.points, delta);
    if (matches.empty()) continue;
    const auto verts = posed_vertices(model, human.params(i));
    set.frames[i] = transfer_contacts(matches, f.human.points, f.object.points, verts, object.posed(i));
  }
  return set;
}

ContactTerm contact_term(const FrameContacts& contacts, std::span<const Vec3> human_vertices,
                         std::span<const Vec3> object_points, double lambda_contact) {
  ContactTerm t;
  t.human_grad.assign(human_vertices.size(), Vec3::Zero());
  t.object_grad.assign(object_points.size(), Vec3::Zero());
  for (const auto& p : contacts.pairs) {
    const Vec3 d = human_vertices[p.human_vertex] - object_points[p.object_point];
    t.value += lambda_contact * d.squaredNorm();
    t.human_grad[p.human_vertex] += 2.0 * lambda_contact * d;
    t.object_grad[p.object_point] -= 2.0 * lambda_contact * d;
  }
  return t;
}

double mean_contact_gap(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                        const ContactSet& contacts) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < contacts.frames.size(); ++i) {
    const auto& f = contacts.frames[i];
    if (f.pairs.empty()) continue;
    const auto verts = posed_vertices(model, human.params(i));
    const auto obj = object.posed(i);
    for (const auto& p : f.pairs) sum += (verts[p.human_vertex] - obj[p.object_point]).norm();
    n += f.pairs.size();
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

JointTargets joint_targets(const SequenceBundle& bundle) {
  std::vector<std::vector<Vec3>> human;
  human.reserve(bundle.size());
  for (const auto& f : bundle.frames) human.push_back(f.human.points);
  return {CloudTargets(std::move(human)), object_targets(bundle)};
}

JointLossResult joint_loss(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                           const ContactSet& contacts, const JointTargets& targets, const SequenceBundle& bundle,
                           const HumanFitConfig& cfg_h, const ObjectFitConfig& cfg_o, const JointConfig& cfg_j,
                           FrameRange range, bool with_grad) {
  const std::size_t T = human.size();
  if (object.size() != T) throw Error(ErrorCode::LengthMismatch, "human and object tracks differ in length");
  if (!contacts.frames.empty() && contacts.frames.size() != T) {
    throw Error(ErrorCode::LengthMismatch, "contact set does not match the track length");
  }
  contacts.validate(model.num_vertices(), object.canonical.size());
  const bool active = !contacts.frames.empty() && cfg_j.lambda_contact != 0.0;

  // Contact values and human-side locations are exchanged through per-frame
  // slots so each component loss keeps its own value.
  std::vector<double> value(T, 0.0);
  std::vector<std::vector<Vec3>> human_at(T);
  PointTerm human_term, object_term;
  if (active) {
    human_term = [&](std::size_t i, std::span<const Vec3> verts, std::span<Vec3> grad) {
      const auto& f = contacts.frames[i];
      if (f.pairs.empty()) return 0.0;
      const auto obj = apply_similarity(object.canonical, object.poses[i]);
      const auto term = contact_term(f, verts, obj, cfg_j.lambda_contact);
      value[i] = term.value;
      for (std::size_t v = 0; v < grad.size(); ++v) grad[v] += term.human_grad[v];
      auto& at = human_at[i];
      for (const auto& p : f.pairs) at.push_back(verts[p.human_vertex]);
      return 0.0;
    };
    object_term = [&](std::size_t i, std::span<const Vec3> points, std::span<Vec3> grad) {
      const auto& f = contacts.frames[i];
      for (std::size_t k = 0; k < f.pairs.size(); ++k) {
        const Vec3 d = human_at[i][k] - points[f.pairs[k].object_point];
        grad[f.pairs[k].object_point] -= 2.0 * cfg_j.lambda_contact * d;
      }
      return 0.0;
    };
  }

  JointLossResult out;
  out.human = human_loss(model, human, targets.human, cfg_h, range, with_grad, human_term);
  out.object = object_loss(object, targets.object, bundle, cfg_o, range, with_grad, object_term);
  for (std::size_t i = range.begin; i < range.end; ++i) {
    if (!std::isfinite(value[i])) {
      throw Error(ErrorCode::NonFiniteLoss, "non-finite contact term at frame " + std::to_string(i));
    }
    out.contact += value[i];
  }
  out.value = out.human.value + out.object.value + out.contact;
  return out;
}

JointLossResult joint_loss(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                           const ContactSet& contacts, const JointTargets& targets, const SequenceBundle& bundle,
                           const HumanFitConfig& cfg_h, const ObjectFitConfig& cfg_o, const JointConfig& cfg_j,
                           bool with_grad) {
  return joint_loss(model, human, object, contacts, targets, bundle, cfg_h, cfg_o, cfg_j, FrameRange{0, human.size()},
                    with_grad);
}

JointRefineResult refine_joint(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                               const SequenceBundle& bundle, const HumanFitConfig& cfg_h,
                               const ObjectFitConfig& cfg_o, const JointConfig& cfg_j) {
  cfg_j.validate();
  const std::size_t T = human.size();
  if (T == 0) throw Error(ErrorCode::EmptyList, "tracks have no frames");
  JointRefineResult result{human, object, build_contacts(model, human, object, bundle, cfg_j.delta), {}};
  const JointTargets targets = joint_targets(bundle);
  const std::size_t P = 3 * model.num_joints();

  std::vector<double> xh(T * P), gh(T * P), xo(T * 6), go(T * 6);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t c = 0; c < P; ++c) xh[i * P + c] = human.frames[i].pose[static_cast<Eigen::Index>(c)];
    const Rot6D r = matrix_to_rot6d(nearest_rotation(object.poses[i].rotation));
    for (int c = 0; c < 6; ++c) xo[i * 6 + c] = r[c];
  }
  auto unpack = [&]() {
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t c = 0; c < P; ++c) result.human.frames[i].pose[static_cast<Eigen::Index>(c)] = xh[i * P + c];
      result.object.poses[i].rotation = rot6d_to_matrix(Eigen::Map<const Rot6D>(xo.data() + i * 6));
    }
  };
  unpack();

  Adam adam_h(xh.size(), AdamOptions{cfg_j.learning_rate_human});
  Adam adam_o(xo.size(), AdamOptions{cfg_j.learning_rate_object});
  std::mt19937_64 rng(cfg_j.seed);
  result.loss_history.reserve(static_cast<std::size_t>(cfg_j.steps));
  for (int step = 0; step < cfg_j.steps; ++step) {
    const FrameRange range = sample_window(T, cfg_j.batch_frames, rng);
    const auto loss = joint_loss(model, result.human, result.object, result.contacts, targets, bundle, cfg_h, cfg_o,
                                 cfg_j, range, true);
    result.loss_history.push_back(loss.value);
    for (std::size_t i = 0; i < T; ++i) {
      const auto& pg = loss.human.grad.frames[i].pose;
      for (std::size_t c = 0; c < P; ++c) gh[i * P + c] = pg[static_cast<Eigen::Index>(c)];
      const Rot6D gr = rot6d_to_matrix_backward(Eigen::Map<const Rot6D>(xo.data() + i * 6), loss.object.grad.poses[i].rotation);
      for (int c = 0; c < 6; ++c) go[i * 6 + c] = gr[c];
    }
    adam_h.step(xh, gh);
    adam_o.step(xo, go);
    unpack();
  }
  return result;
}

}  // namespace intertrack
