// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/object_track.hpp"

#include <cmath>
#include <random>
#include <string>

#include "intertrack/adam.hpp"
#include "intertrack/error.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

CanonicalInit init_canonical_shape(const SequenceBundle& bundle, std::span<const Mat3> rotations, double threshold,
                                   std::uint64_t seed) {
  if (rotations.size() != bundle.size()) throw Error(ErrorCode::LengthMismatch, "one rotation per frame is required");
  std::vector<std::size_t> qualifying;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if (bundle.frames[i].visibility >= threshold && !bundle.frames[i].object.empty()) qualifying.push_back(i);
  }
  if (qualifying.empty()) {
    throw Error(ErrorCode::NoVisibleFrame, "no frame has object visibility >= " + std::to_string(threshold));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, qualifying.size() - 1);
  CanonicalInit init;
  init.frame = qualifying[pick(rng)];
  const auto& cloud = bundle.frames[init.frame].object;
  const Vec3 c = cloud.centroid();
  const Mat3 Rt = rotations[init.frame].transpose();
  init.points.reserve(cloud.size());
  for (const auto& p : cloud.points) init.points.push_back(Rt * (p - c));
  return init;
}

SilhouetteResult occlusion_silhouette_loss(const SoftMask& rendered, const SoftMask& object_mask,
                                           const SoftMask& human_mask) {
  if (!rendered.same_shape(object_mask) || !rendered.same_shape(human_mask)) {
    throw Error(ErrorCode::DimensionMismatch, "silhouette masks differ in size");
  }
  SilhouetteResult r;
  r.grad = SoftMask(rendered.width, rendered.height);
  std::size_t count = 0;
  for (std::size_t p = 0; p < rendered.size(); ++p) count += human_mask.values[p] < 0.5;
  if (count == 0) return r;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t p = 0; p < rendered.size(); ++p) {
    if (human_mask.values[p] >= 0.5) continue;
    const double d = rendered.values[p] - object_mask.values[p];
    r.value += d * d;
    r.grad.values[p] = 2.0 * d * inv;
  }
  r.value *= inv;
  return r;
}

CloudTargets object_targets(const SequenceBundle& bundle) {
  std::vector<std::vector<Vec3>> clouds;
  clouds.reserve(bundle.size());
  for (const auto& f : bundle.frames) clouds.push_back(f.object.points);
  return CloudTargets(std::move(clouds));
}

namespace {

void check_term(double value, std::size_t frame, const char* term) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteLoss, std::string("non-finite ") + term + " term at frame " + std::to_string(frame));
  }
}

}  // namespace

ObjectLossResult object_loss(const ObjectTrack& track, const CloudTargets& targets, const SequenceBundle& bundle,
                             const ObjectFitConfig& cfg, FrameRange range, bool with_grad, const PointTerm& extra) {
  const std::size_t T = track.size();
  if (targets.size() != T || bundle.size() != T) {
    throw Error(ErrorCode::LengthMismatch, "track, targets and bundle must have the same frame count");
  }
  if (track.canonical.empty()) throw Error(ErrorCode::EmptyCloud, "canonical shape is empty");
  if (range.end > T || range.begin > range.end) throw Error(ErrorCode::LengthMismatch, "frame range outside track");
  const std::size_t n = range.size();
  const std::size_t N = track.canonical.size();

  std::vector<std::vector<Vec3>> posed(n);
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (std::size_t k = 0; k < n; ++k) posed[k] = track.posed(range.begin + k);

  ObjectLossResult out;
  std::vector<std::vector<Vec3>> pgrad(n, std::vector<Vec3>(with_grad ? N : 0, Vec3::Zero()));
  if (with_grad) {
    out.grad.canonical.assign(N, Vec3::Zero());
    out.grad.poses.assign(T, PoseGrad{});
  }

  if (n >= 3) {
    if (cfg.lambda_acc_points > 0.0) {
      const auto acc = acceleration_loss(std::span<const std::vector<Vec3>>(posed));
      out.acc_points = cfg.lambda_acc_points * acc.value;
      if (with_grad)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t j = 0; j < N; ++j) pgrad[k][j] = cfg.lambda_acc_points * acc.grad[k][j];
    }
    std::vector<Mat3> R(n);
    std::vector<Vec3> t(n);
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& pose = track.poses[range.begin + k];
      R[k] = pose.rotation;
      t[k] = pose.translation;
      s[k] = pose.scale();
    }
    if (cfg.lambda_acc_rotation > 0.0) {
      const auto acc = acceleration_loss(std::span<const Mat3>(R));
      out.acc_rotation = cfg.lambda_acc_rotation * acc.value;
      if (with_grad)
        for (std::size_t k = 0; k < n; ++k) out.grad.poses[range.begin + k].rotation += cfg.lambda_acc_rotation * acc.grad[k];
    }
    if (cfg.lambda_acc_translation > 0.0) {
      const auto acc = acceleration_loss(std::span<const Vec3>(t));
      out.acc_translation = cfg.lambda_acc_translation * acc.value;
      if (with_grad)
        for (std::size_t k = 0; k < n; ++k)
          out.grad.poses[range.begin + k].translation += cfg.lambda_acc_translation * acc.grad[k];
    }
    if (cfg.lambda_acc_scale > 0.0) {
      const auto acc = acceleration_loss(std::span<const double>(s));
      out.acc_scale = cfg.lambda_acc_scale * acc.value;
      if (with_grad)
        for (std::size_t k = 0; k < n; ++k)
          out.grad.poses[range.begin + k].log_scale += cfg.lambda_acc_scale * acc.grad[k] * s[k];
    }
    check_term(out.acc_points + out.acc_rotation + out.acc_translation + out.acc_scale, range.begin, "acceleration");
  }

  std::vector<double> chamfer(n, 0.0), silhouette(n, 0.0), extra_value(n, 0.0);
  std::vector<SimilarityGrad> sgrad(n);
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = range.begin + k;
    const auto cd = chamfer_distance(posed[k], targets[i], with_grad);
    chamfer[k] = cfg.lambda_cd * cd.value;
    if (with_grad)
      for (std::size_t j = 0; j < N; ++j) pgrad[k][j] += cfg.lambda_cd * cd.grad[j];

    if (cfg.lambda_occ > 0.0) {
      const auto& frame = bundle.frames[i];
      const SoftMask rendered = rasterize_soft_mask(posed[k], bundle.camera, cfg.splat_radius);
      auto sil = occlusion_silhouette_loss(rendered, frame.object_mask, frame.human_mask);
      silhouette[k] = cfg.lambda_occ * sil.value;
      if (with_grad) {
        for (auto& v : sil.grad.values) v *= cfg.lambda_occ;
        const auto g = rasterize_soft_mask_backward(posed[k], bundle.camera, cfg.splat_radius, sil.grad);
        for (std::size_t j = 0; j < N; ++j) pgrad[k][j] += g[j];
      }
    }
    if (extra) {
      std::vector<Vec3> eg(N, Vec3::Zero());
      extra_value[k] = extra(i, posed[k], eg);
      if (with_grad)
        for (std::size_t j = 0; j < N; ++j) pgrad[k][j] += eg[j];
    }
    if (with_grad) sgrad[k] = apply_similarity_backward(track.canonical, track.poses[i], pgrad[k]);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = range.begin + k;
    check_term(chamfer[k], i, "chamfer");
    check_term(silhouette[k], i, "silhouette");
    check_term(extra_value[k], i, "contact");
    out.chamfer += chamfer[k];
    out.silhouette += silhouette[k];
    out.value += chamfer[k] + silhouette[k] + extra_value[k];
    if (with_grad) {
      for (std::size_t j = 0; j < N; ++j) out.grad.canonical[j] += sgrad[k].points[j];
      auto& pg = out.grad.poses[i];
      pg.rotation += sgrad[k].rotation;
      pg.translation += sgrad[k].translation;
      pg.log_scale += sgrad[k].log_scale;
    }
  }
  out.value += out.acc_points + out.acc_rotation + out.acc_translation + out.acc_scale;
  return out;
}

ObjectLossResult object_loss(const ObjectTrack& track, const CloudTargets& targets, const SequenceBundle& bundle,
                             const ObjectFitConfig& cfg, bool with_grad) {
  return object_loss(track, targets, bundle, cfg, FrameRange{0, track.size()}, with_grad);
}

void recenter_canonical(ObjectTrack& track) {
  if (track.canonical.empty()) return;
  Vec3 c = Vec3::Zero();
  for (const auto& p : track.canonical) c += p;
  c /= static_cast<double>(track.canonical.size());
  for (auto& p : track.canonical) p -= c;
  for (auto& pose : track.poses) pose.translation += pose.scale() * (pose.rotation * c);
}

ObjectFitResult fit_object(const SequenceBundle& bundle, std::span<const Mat3> rotations_init,
                           const ObjectFitConfig& cfg) {
  const auto init = init_canonical_shape(bundle, rotations_init, cfg.visibility_threshold, cfg.seed);
  ObjectTrack track;
  track.canonical = init.points;
  track.poses.resize(bundle.size());
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    track.poses[i].rotation = rotations_init[i];
    track.poses[i].translation = bundle.frames[i].object.centroid();
  }
  ObjectFitConfig free_cfg = cfg;
  free_cfg.freeze_canonical = false;
  auto result = fit_object(bundle, track, free_cfg);
  recenter_canonical(result.track);
  result.init_frame = init.frame;
  return result;
}

ObjectFitResult fit_object(const SequenceBundle& bundle, const ObjectTrack& init, const ObjectFitConfig& cfg) {
  const std::size_t T = init.size();
  if (T == 0) throw Error(ErrorCode::EmptyList, "object track has no frames");
  if (bundle.size() != T) throw Error(ErrorCode::LengthMismatch, "track and bundle frame counts differ");
  const CloudTargets targets = object_targets(bundle);
  const std::size_t N = init.canonical.size();
  const std::size_t shape_params = cfg.freeze_canonical ? 0 : 3 * N;
  constexpr std::size_t kPoseStride = 10;

  ObjectFitResult result{init, {}, 0};
  ObjectTrack& track = result.track;
  std::vector<double> x(shape_params + T * kPoseStride), g(x.size());
  for (std::size_t j = 0; j < shape_params / 3; ++j)
    for (int c = 0; c < 3; ++c) x[3 * j + c] = track.canonical[j][c];
  for (std::size_t i = 0; i < T; ++i) {
    double* d = x.data() + shape_params + i * kPoseStride;
    const Rot6D r = matrix_to_rot6d(nearest_rotation(track.poses[i].rotation));
    for (int c = 0; c < 6; ++c) d[c] = r[c];
    for (int c = 0; c < 3; ++c) d[6 + c] = track.poses[i].translation[c];
    d[9] = track.poses[i].log_scale;
  }
  auto unpack = [&]() {
    for (std::size_t j = 0; j < shape_params / 3; ++j) track.canonical[j] = Vec3(x[3 * j], x[3 * j + 1], x[3 * j + 2]);
    for (std::size_t i = 0; i < T; ++i) {
      const double* d = x.data() + shape_params + i * kPoseStride;
      track.poses[i].rotation = rot6d_to_matrix(Eigen::Map<const Rot6D>(d));
      track.poses[i].translation = Vec3(d[6], d[7], d[8]);
      track.poses[i].log_scale = d[9];
    }
  };
  unpack();

  Adam adam(x.size(), AdamOptions{cfg.learning_rate});
  std::mt19937_64 rng(cfg.seed);
  result.loss_history.reserve(static_cast<std::size_t>(std::max(cfg.steps, 0)));
  for (int step = 0; step < cfg.steps; ++step) {
    const FrameRange range = sample_window(T, cfg.batch_frames, rng);
    const auto loss = object_loss(track, targets, bundle, cfg, range, true);
    result.loss_history.push_back(loss.value);
    for (std::size_t j = 0; j < shape_params / 3; ++j)
      for (int c = 0; c < 3; ++c) g[3 * j + c] = loss.grad.canonical[j][c];
    for (std::size_t i = 0; i < T; ++i) {
      double* gd = g.data() + shape_params + i * kPoseStride;
      const double* d = x.data() + shape_params + i * kPoseStride;
      const Rot6D gr = rot6d_to_matrix_backward(Eigen::Map<const Rot6D>(d), loss.grad.poses[i].rotation);
      for (int c = 0; c < 6; ++c) gd[c] = gr[c];
      for (int c = 0; c < 3; ++c) gd[6 + c] = loss.grad.poses[i].translation[c];
      gd[9] = loss.grad.poses[i].log_scale;
    }
    adam.step(x, g);
    unpack();
  }
  return result;
}

}  // namespace intertrack
