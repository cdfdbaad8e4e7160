// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/human_track.hpp"

#include <cmath>
#include <string>

#include "intertrack/adam.hpp"
#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"

namespace intertrack {

BodyParams HumanTrack::params(std::size_t i) const {
  BodyParams p;
  p.pose = frames[i].pose;
  p.shape = mean_shape;
  p.translation = frames[i].translation;
  p.log_scale = frames[i].log_scale;
  return p;
}

HumanTrack HumanTrack::from_params(std::span<const BodyParams> params) {
  HumanTrack track;
  std::vector<Eigen::VectorXd> shapes;
  for (const auto& p : params) {
    track.frames.push_back({p.pose, p.translation, p.log_scale});
    shapes.push_back(p.shape);
  }
  track.mean_shape = intertrack::mean_shape(shapes);
  return track;
}

Eigen::VectorXd mean_shape(std::span<const Eigen::VectorXd> shapes) {
  if (shapes.empty()) throw Error(ErrorCode::EmptyList, "mean_shape needs at least one shape");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(shapes[0].size());
  for (const auto& s : shapes) {
    if (s.size() != sum.size()) throw Error(ErrorCode::LengthMismatch, "shape vectors differ in length");
    sum += s;
  }
  return sum / static_cast<double>(shapes.size());
}

PriorResult pose_prior(const Eigen::VectorXd& pose) {
  PriorResult r;
  r.grad = Eigen::VectorXd::Zero(pose.size());
  for (Eigen::Index c = 3; c < pose.size(); ++c) {
    const double x = pose[c];
    r.value += x * x;
    r.grad[c] += 2.0 * x;
    const double excess = std::abs(x) - kJointLimit;
    if (excess > 0.0) {
      r.value += excess * excess;
      r.grad[c] += 2.0 * excess * (x > 0.0 ? 1.0 : -1.0);
    }
  }
  return r;
}

namespace {

void check_frame(double value, std::size_t frame, const char* term) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteLoss,
                std::string("non-finite ") + term + " term at frame " + std::to_string(frame));
  }
}

}  // namespace

HumanLossResult human_loss(const BodyModel& model, const HumanTrack& track, const CloudTargets& targets,
                           const HumanFitConfig& cfg, FrameRange range, bool with_grad, const PointTerm& extra) {
  const std::size_t T = track.size();
  if (targets.size() != T) throw Error(ErrorCode::LengthMismatch, "one target cloud per frame is required");
  if (range.end > T || range.begin > range.end) throw Error(ErrorCode::LengthMismatch, "frame range outside track");
  const std::size_t n = range.size();
  const std::size_t V = model.num_vertices();

  std::vector<std::vector<Vec3>> verts(n);
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (std::size_t k = 0; k < n; ++k) verts[k] = posed_vertices(model, track.params(range.begin + k));

  HumanLossResult out;
  std::vector<std::vector<Vec3>> vgrad(n, std::vector<Vec3>(with_grad ? V : 0, Vec3::Zero()));
  if (n >= 3 && cfg.lambda_acc > 0.0) {
    auto acc = acceleration_loss(std::span<const std::vector<Vec3>>(verts));
    out.acceleration = cfg.lambda_acc * acc.value;
    check_frame(out.acceleration, range.begin, "acceleration");
    if (with_grad) {
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t v = 0; v < V; ++v) vgrad[k][v] = cfg.lambda_acc * acc.grad[k][v];
    }
  }

  std::vector<double> chamfer(n, 0.0), prior(n, 0.0), extra_value(n, 0.0);
  std::vector<PriorResult> prior_res(n);
  if (with_grad) {
    out.grad.mean_shape = Eigen::VectorXd::Zero(track.mean_shape.size());
    out.grad.frames.resize(T);
    for (std::size_t i = 0; i < T; ++i) {
      out.grad.frames[i].pose = Eigen::VectorXd::Zero(track.frames[i].pose.size());
    }
  }
  std::vector<Eigen::VectorXd> shape_grad(n);

#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = range.begin + k;
    const auto cd = chamfer_distance(verts[k], targets[i], with_grad);
    chamfer[k] = cfg.lambda_cd * cd.value;
    prior_res[k] = pose_prior(track.frames[i].pose);
    prior[k] = cfg.lambda_prior * prior_res[k].value;
    if (with_grad) {
      for (std::size_t v = 0; v < V; ++v) vgrad[k][v] += cfg.lambda_cd * cd.grad[v];
    }
    if (extra) {
      std::vector<Vec3> eg(V, Vec3::Zero());
      extra_value[k] = extra(i, verts[k], eg);
      if (with_grad)
        for (std::size_t v = 0; v < V; ++v) vgrad[k][v] += eg[v];
    }
    if (with_grad) {
      const auto g = posed_vertices_backward(model, track.params(i), vgrad[k]);
      auto& dst = out.grad.frames[i];
      dst.pose = g.pose + cfg.lambda_prior * prior_res[k].grad;
      dst.translation = g.translation;
      dst.log_scale = g.log_scale;
      shape_grad[k] = g.shape;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    check_frame(chamfer[k], range.begin + k, "chamfer");
    check_frame(prior[k], range.begin + k, "prior");
    check_frame(extra_value[k], range.begin + k, "contact");
    out.chamfer += chamfer[k];
    out.prior += prior[k];
    out.value += chamfer[k] + prior[k] + extra_value[k];
    if (with_grad) out.grad.mean_shape += shape_grad[k];
  }
  out.value += out.acceleration;
  return out;
}

HumanLossResult human_loss(const BodyModel& model, const HumanTrack& track, const CloudTargets& targets,
                           const HumanFitConfig& cfg, bool with_grad) {
  return human_loss(model, track, targets, cfg, FrameRange{0, track.size()}, with_grad);
}

HumanFitResult fit_human(const BodyModel& model, const CloudTargets& targets, const HumanTrack& init,
                         const HumanFitConfig& cfg) {
  const std::size_t T = init.size();
  if (T == 0) throw Error(ErrorCode::EmptyList, "human track has no frames");
  if (targets.size() != T) throw Error(ErrorCode::LengthMismatch, "one target cloud per frame is required");
  const std::size_t P = 3 * model.num_joints();
  const std::size_t stride = P + 4;

  HumanFitResult result{init, {}};
  HumanTrack& track = result.track;
  std::vector<double> x(T * stride), g(T * stride);
  auto pack = [&](const std::vector<HumanFrame>& frames, std::vector<double>& dst) {
    for (std::size_t i = 0; i < T; ++i) {
      double* d = dst.data() + i * stride;
      for (std::size_t c = 0; c < P; ++c) d[c] = frames[i].pose[static_cast<Eigen::Index>(c)];
      for (int c = 0; c < 3; ++c) d[P + c] = frames[i].translation[c];
      d[P + 3] = frames[i].log_scale;
    }
  };
  auto unpack = [&]() {
    for (std::size_t i = 0; i < T; ++i) {
      const double* d = x.data() + i * stride;
      for (std::size_t c = 0; c < P; ++c) track.frames[i].pose[static_cast<Eigen::Index>(c)] = d[c];
      for (int c = 0; c < 3; ++c) track.frames[i].translation[c] = d[P + c];
      track.frames[i].log_scale = d[P + 3];
    }
  };
  pack(track.frames, x);

  Adam adam(x.size(), AdamOptions{cfg.learning_rate});
  std::mt19937_64 rng(cfg.seed);
  result.loss_history.reserve(static_cast<std::size_t>(std::max(cfg.steps, 0)));
  for (int step = 0; step < cfg.steps; ++step) {
    const FrameRange range = sample_window(T, cfg.batch_frames, rng);
    const auto loss = human_loss(model, track, targets, cfg, range, true);
    result.loss_history.push_back(loss.value);
    pack(loss.grad.frames, g);
    adam.step(x, g);
    unpack();
  }
  return result;
}

}  // namespace intertrack
