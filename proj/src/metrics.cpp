// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/kernels.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

namespace {

std::vector<Neighbor> nearest_all(std::span<const Vec3> ref, std::span<const Vec3> queries) {
  const NeighborIndex index(ref);
  return nearest_neighbors(index, queries);
}

double fraction_within(std::span<const Vec3> ref, std::span<const Vec3> queries, double tau) {
  const auto nn = nearest_all(ref, queries);
  std::size_t hits = 0;
  for (const auto& n : nn) hits += std::sqrt(n.sq_dist) <= tau;
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

}  // namespace

FScore fscore_detail(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau) {
  if (pred.empty() || gt.empty()) throw Error(ErrorCode::EmptyCloud, "F-score needs two non-empty clouds");
  FScore f;
  f.precision = fraction_within(gt, pred, tau);
  f.recall = fraction_within(pred, gt, tau);
  const double denom = f.precision + f.recall;
  f.fscore = denom > 0.0 ? 2.0 * f.precision * f.recall / denom : 0.0;
  return f;
}

double fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau) {
  return fscore_detail(pred, gt, tau).fscore;
}

SimilarityPose procrustes_align(std::span<const Vec3> pred, std::span<const Vec3> gt,
                                std::span<const std::size_t> correspondence) {
  if (correspondence.empty() && pred.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, "index correspondence needs equal point counts");
  }
  if (!correspondence.empty() && correspondence.size() != pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "correspondence must map every predicted point");
  }
  const std::size_t n = pred.size();
  if (n < 3) throw Error(ErrorCode::DegenerateConfiguration, "alignment needs at least three pairs");
  auto target = [&](std::size_t i) -> const Vec3& {
    if (correspondence.empty()) return gt[i];
    if (correspondence[i] >= gt.size()) throw Error(ErrorCode::LengthMismatch, "correspondence index out of range");
    return gt[correspondence[i]];
  };

  Vec3 mx = Vec3::Zero(), my = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mx += pred[i];
    my += target(i);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  Mat3 sigma = Mat3::Zero(), cov_x = Mat3::Zero();
  double var_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 dx = pred[i] - mx;
    sigma += (target(i) - my) * dx.transpose();
    cov_x += dx * dx.transpose();
    var_x += dx.squaredNorm();
  }
  sigma /= static_cast<double>(n);
  var_x /= static_cast<double>(n);

  const Eigen::JacobiSVD<Mat3> cx(cov_x);
  if (cx.singularValues()[0] <= 0.0 || cx.singularValues()[1] < 1e-12 * cx.singularValues()[0]) {
    throw Error(ErrorCode::DegenerateConfiguration, "predicted points are collinear");
  }
  const Eigen::JacobiSVD<Mat3> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d(1.0, 1.0, 1.0);
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d[2] = -1.0;
  const double s = svd.singularValues().dot(d) / var_x;
  if (!(s > 0.0)) throw Error(ErrorCode::DegenerateConfiguration, "alignment scale is not positive");

  SimilarityPose pose;
  pose.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  pose.log_scale = std::log(s);
  pose.translation = my - s * (pose.rotation * mx);
  return pose;
}

AlignMode parse_align_mode(const std::string& name) {
  if (name == "none") return AlignMode::None;
  if (name == "joint") return AlignMode::Joint;
  if (name == "per-entity") return AlignMode::PerEntity;
  throw Error(ErrorCode::InvalidConfig, "unknown alignment mode '" + name + "'");
}

const char* to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::None:
      return "none";
    case AlignMode::Joint:
      return "joint";
    case AlignMode::PerEntity:
      return "per-entity";
  }
  return "none";
}

double registration_loss(std::span<const Vec3> pred_vertices, std::span<const Vec3> gt_vertices,
                         std::span<const Vec3> gt_samples, double lambda_v2v) {
  if (pred_vertices.size() != gt_vertices.size()) {
    throw Error(ErrorCode::LengthMismatch, "predicted and ground-truth vertex counts differ");
  }
  double v2v = 0.0;
  for (std::size_t i = 0; i < pred_vertices.size(); ++i) v2v += (pred_vertices[i] - gt_vertices[i]).squaredNorm();
  if (!pred_vertices.empty()) v2v /= static_cast<double>(pred_vertices.size());
  return chamfer_distance(pred_vertices, gt_samples, false).value + lambda_v2v * v2v;
}

RotationErrors rotation_error(std::span<const Mat3> pred, std::span<const Mat3> gt) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::LengthMismatch, "rotation sequences differ in length");
  RotationErrors e;
  e.per_frame_deg.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) e.per_frame_deg.push_back(geodesic_angle(pred[i], gt[i]) * 180.0 / M_PI);
  if (pred.empty()) return e;
  double sum = 0.0;
  for (double a : e.per_frame_deg) sum += a;
  e.mean_deg = sum / static_cast<double>(pred.size());
  auto sorted = e.per_frame_deg;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  e.median_deg = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  return e;
}

double mean_nearest_distance(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  if (pred.empty() || gt.empty()) throw Error(ErrorCode::EmptyCloud, "distance needs two non-empty clouds");
  double sum = 0.0;
  for (const auto& n : nearest_all(gt, pred)) sum += std::sqrt(n.sq_dist);
  return sum / static_cast<double>(pred.size());
}

double mean_vertex_distance(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::LengthMismatch, "vertex counts differ");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - gt[i]).norm();
  return sum / static_cast<double>(pred.size());
}

double chamfer_l1(std::span<const Vec3> a, std::span<const Vec3> b) {
  return 0.5 * (mean_nearest_distance(a, b) + mean_nearest_distance(b, a));
}

double jitter(std::span<const std::vector<Vec3>> sequence) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 2; t < sequence.size(); ++t) {
    const auto& a = sequence[t];
    const auto& b = sequence[t - 1];
    const auto& c = sequence[t - 2];
    if (a.size() != b.size() || a.size() != c.size()) {
      throw Error(ErrorCode::LengthMismatch, "jitter needs equal point counts per frame");
    }
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - 2.0 * b[i] + c[i]).norm();
    count += a.size();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

SimilarityPose estimate_gauge(std::span<const SimilarityPose> pred, std::span<const SimilarityPose> ref) {
  if (pred.size() != ref.size()) throw Error(ErrorCode::LengthMismatch, "pose sequences differ in length");
  if (pred.empty()) throw Error(ErrorCode::EmptyList, "gauge needs at least one pose");
  std::vector<Mat3> rotations;
  double log_scale = 0.0;
  Vec3 translation = Vec3::Zero();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const SimilarityPose g = pred[i].inverse().compose(ref[i]);
    rotations.push_back(g.rotation);
    log_scale += g.log_scale;
    translation += g.translation;
  }
  const double n = static_cast<double>(pred.size());
  SimilarityPose gauge;
  gauge.rotation = nearest_rotation([&] {
    Mat3 sum = Mat3::Zero();
    for (const auto& R : rotations) sum += R;
    return Mat3(sum / n);
  }());
  gauge.log_scale = log_scale / n;
  gauge.translation = translation / n;
  return gauge;
}

PoseErrors pose_errors(std::span<const SimilarityPose> pred, std::span<const SimilarityPose> ref,
                       const SimilarityPose& gauge) {
  if (pred.size() != ref.size()) throw Error(ErrorCode::LengthMismatch, "pose sequences differ in length");
  std::vector<Mat3> a, b;
  PoseErrors e;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const SimilarityPose p = pred[i].compose(gauge);
    a.push_back(p.rotation);
    b.push_back(ref[i].rotation);
    e.translation_mean += (p.translation - ref[i].translation).norm();
  }
  if (!pred.empty()) e.translation_mean /= static_cast<double>(pred.size());
  e.rotation = rotation_error(a, b);
  return e;
}

std::string to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["human_fscore"] = r.human_fscore;
  j["object_fscore"] = r.object_fscore;
  j["combined_fscore"] = r.combined_fscore;
  j["chamfer_cm"] = r.chamfer_cm;
  j["rot_mean_deg"] = r.rot_mean_deg;
  j["rot_median_deg"] = r.rot_median_deg;
  j["trans_cm"] = r.trans_cm;
  j["jitter"] = r.jitter;
  j["runtime_s"] = r.runtime_s;
  return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  MetricReport r;
  auto get = [&](const char* key, double& dst) {
    if (!j.contains(key) || !j[key].is_number()) throw Error(ErrorCode::ParseError, std::string("report: missing ") + key);
    dst = j[key].get<double>();
  };
  get("human_fscore", r.human_fscore);
  get("object_fscore", r.object_fscore);
  get("combined_fscore", r.combined_fscore);
  get("chamfer_cm", r.chamfer_cm);
  get("rot_mean_deg", r.rot_mean_deg);
  get("rot_median_deg", r.rot_median_deg);
  get("trans_cm", r.trans_cm);
  get("jitter", r.jitter);
  get("runtime_s", r.runtime_s);
  return r;
}

}  // namespace intertrack
