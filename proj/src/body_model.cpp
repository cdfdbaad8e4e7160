// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "intertrack/error.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

void BodyTemplate::validate() const {
  const std::size_t V = num_vertices();
  const std::size_t K = num_joints();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "body template: " + msg); };
  if (K < 1) fail("no joints");
  if (V < K) fail("fewer vertices than joints");
  if (parents[0] != -1) fail("joint 0 must be the root");
  for (std::size_t j = 1; j < K; ++j) {
    if (parents[j] < 0 || parents[j] >= static_cast<int>(j)) fail("parent of joint " + std::to_string(j) + " must precede it");
  }
  for (const auto& v : rest_vertices) {
    if (!v.allFinite()) fail("non-finite rest vertex");
  }
  if (joint_regressor.rows() != static_cast<Eigen::Index>(K) || joint_regressor.cols() != static_cast<Eigen::Index>(V)) {
    fail("joint regressor must be K x V");
  }
  if (skin_weights.rows() != static_cast<Eigen::Index>(V) || skin_weights.cols() != static_cast<Eigen::Index>(K)) {
    fail("skin weights must be V x K");
  }
  if (shape_basis.rows() != static_cast<Eigen::Index>(3 * V)) fail("shape basis must have 3V rows");
  if (!shape_basis.allFinite()) fail("non-finite shape basis");
  for (Eigen::Index k = 0; k < joint_regressor.rows(); ++k) {
    if (joint_regressor.row(k).minCoeff() < 0.0) fail("negative regressor weight");
    if (std::abs(joint_regressor.row(k).sum() - 1.0) > 1e-9) fail("regressor row " + std::to_string(k) + " does not sum to 1");
  }
  for (Eigen::Index v = 0; v < skin_weights.rows(); ++v) {
    const auto row = skin_weights.row(v);
    if (row.minCoeff() < 0.0) fail("negative skin weight");
    if ((row.array() != 0.0).count() > 4) fail("more than 4 influences on vertex " + std::to_string(v));
    if (std::abs(row.sum() - 1.0) > 1e-9) fail("skin weights of vertex " + std::to_string(v) + " do not sum to 1");
  }
}

BodyModel::BodyModel(BodyTemplate tmpl) : tmpl_(std::move(tmpl)) {
  tmpl_.validate();
  const std::size_t V = tmpl_.num_vertices();
  const std::size_t K = tmpl_.num_joints();
  skin_start_.assign(V + 1, 0);
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t k = 0; k < K; ++k) {
      const double w = tmpl_.skin_weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k));
      if (w != 0.0) skin_.push_back({static_cast<std::uint32_t>(k), w});
    }
    skin_start_[v + 1] = static_cast<std::uint32_t>(skin_.size());
  }
  reg_start_.assign(K + 1, 0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < V; ++v) {
      const double w = tmpl_.joint_regressor(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v));
      if (w != 0.0) reg_.push_back({static_cast<std::uint32_t>(v), w});
    }
    reg_start_[k + 1] = static_cast<std::uint32_t>(reg_.size());
  }
}

std::span<const BodyModel::Influence> BodyModel::influences(std::size_t vertex) const {
  return {skin_.data() + skin_start_[vertex], skin_.data() + skin_start_[vertex + 1]};
}

std::span<const BodyModel::Influence> BodyModel::regressor_row(std::size_t joint) const {
  return {reg_.data() + reg_start_[joint], reg_.data() + reg_start_[joint + 1]};
}

std::vector<Vec3> BodyModel::shaped_vertices(const Eigen::VectorXd& shape) const {
  if (static_cast<std::size_t>(shape.size()) != num_shape()) {
    throw Error(ErrorCode::LengthMismatch, "shape vector has " + std::to_string(shape.size()) + " entries, expected " +
                                               std::to_string(num_shape()));
  }
  std::vector<Vec3> out = tmpl_.rest_vertices;
  if (num_shape() == 0) return out;
  const Eigen::VectorXd disp = tmpl_.shape_basis * shape;
  for (std::size_t v = 0; v < out.size(); ++v) out[v] += disp.segment<3>(static_cast<Eigen::Index>(3 * v));
  return out;
}

std::vector<Vec3> BodyModel::regress_joints(std::span<const Vec3> vertices) const {
  std::vector<Vec3> joints(num_joints(), Vec3::Zero());
  for (std::size_t k = 0; k < num_joints(); ++k) {
    for (const auto& inf : regressor_row(k)) joints[k] += inf.weight * vertices[inf.joint];
  }
  return joints;
}

namespace {

void check_pose(const BodyModel& model, const Eigen::VectorXd& pose) {
  if (static_cast<std::size_t>(pose.size()) != 3 * model.num_joints()) {
    throw Error(ErrorCode::LengthMismatch, "pose vector must hold 3 values per joint");
  }
}

struct Forward {
  std::vector<Vec3> shaped;
  std::vector<Vec3> joints;
  std::vector<Mat3> local;
  JointTransforms world;
  std::vector<Mat3> skin_rotation;
  std::vector<Vec3> skin_translation;
  std::vector<Vec3> skinned;
};

Forward run_forward(const BodyModel& model, const Eigen::VectorXd& pose, const Eigen::VectorXd& shape,
                    bool skin) {
  check_pose(model, pose);
  const auto& parents = model.body_template().parents;
  const std::size_t K = model.num_joints();
  Forward f;
  f.shaped = model.shaped_vertices(shape);
  f.joints = model.regress_joints(f.shaped);
  f.local.resize(K);
  f.world.rotation.resize(K);
  f.world.translation.resize(K);
  // Joint displacement from its rest location, accumulated along the tree.
  std::vector<Vec3> shift(K, Vec3::Zero());
  for (std::size_t j = 0; j < K; ++j) {
    f.local[j] = axis_angle_to_matrix(pose.segment<3>(static_cast<Eigen::Index>(3 * j)));
    const int p = parents[j];
    if (p < 0) {
      f.world.rotation[j] = f.local[j];
    } else {
      f.world.rotation[j] = f.world.rotation[p] * f.local[j];
      shift[j] = (f.world.rotation[p] - Mat3::Identity()) * (f.joints[j] - f.joints[p]) + shift[p];
    }
    f.world.translation[j] = f.joints[j] + shift[j];
  }
  if (!skin) return f;
  f.skin_rotation = f.world.rotation;
  f.skin_translation.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    f.skin_translation[k] = shift[k] - (f.world.rotation[k] - Mat3::Identity()) * f.joints[k];
  }
  // Skinning written as an offset from the shaped vertex so the rest pose is reproduced exactly.
  f.skinned = f.shaped;
  for (std::size_t v = 0; v < model.num_vertices(); ++v) {
    Vec3 offset = Vec3::Zero();
    for (const auto& inf : model.influences(v)) {
      offset += inf.weight * ((f.skin_rotation[inf.joint] - Mat3::Identity()) * f.shaped[v] +
                              f.skin_translation[inf.joint]);
    }
    f.skinned[v] += offset;
  }
  return f;
}

}  // namespace

JointTransforms forward_kinematics(const BodyModel& model, const Eigen::VectorXd& pose, const Eigen::VectorXd& shape) {
  return run_forward(model, pose, shape, false).world;
}

std::vector<Vec3> posed_vertices(const BodyModel& model, const BodyParams& params) {
  Forward f = run_forward(model, params.pose, params.shape, true);
  const double s = std::exp(params.log_scale);
  for (auto& v : f.skinned) v = s * v + params.translation;
  return std::move(f.skinned);
}

BodyParamsGrad posed_vertices_backward(const BodyModel& model, const BodyParams& params,
                                       std::span<const Vec3> grad_vertices) {
  const std::size_t V = model.num_vertices();
  const std::size_t K = model.num_joints();
  if (grad_vertices.size() != V) throw Error(ErrorCode::LengthMismatch, "vertex gradient size differs from template");
  const Forward f = run_forward(model, params.pose, params.shape, true);
  const auto& parents = model.body_template().parents;
  const double s = std::exp(params.log_scale);

  BodyParamsGrad g;
  g.pose = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * K));
  g.shape = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.num_shape()));

  // Similarity.
  std::vector<Vec3> g_skinned(V);
  double scale_term = 0.0;
  for (std::size_t v = 0; v < V; ++v) {
    g.translation += grad_vertices[v];
    scale_term += grad_vertices[v].dot(f.skinned[v]);
    g_skinned[v] = s * grad_vertices[v];
  }
  g.log_scale = s * scale_term;

  // Skinning.
  std::vector<Mat3> g_skin_R(K, Mat3::Zero());
  std::vector<Vec3> g_skin_t(K, Vec3::Zero());
  std::vector<Vec3> g_shaped(V, Vec3::Zero());
  for (std::size_t v = 0; v < V; ++v) {
    for (const auto& inf : model.influences(v)) {
      const Vec3 gw = inf.weight * g_skinned[v];
      g_skin_R[inf.joint] += gw * f.shaped[v].transpose();
      g_skin_t[inf.joint] += gw;
      g_shaped[v] += f.skin_rotation[inf.joint].transpose() * gw;
    }
  }

  // Skinning transform A = (G.R, G.t - G.R J).
  std::vector<Mat3> g_world_R(K);
  std::vector<Vec3> g_world_t(K);
  std::vector<Vec3> g_joints(K, Vec3::Zero());
  for (std::size_t k = 0; k < K; ++k) {
    g_world_R[k] = g_skin_R[k] - g_skin_t[k] * f.joints[k].transpose();
    g_world_t[k] = g_skin_t[k];
    g_joints[k] -= f.world.rotation[k].transpose() * g_skin_t[k];
  }

  // Kinematic chain, leaves first.
  std::vector<Mat3> g_local(K);
  for (std::size_t jj = K; jj-- > 0;) {
    const int p = parents[jj];
    if (p < 0) {
      g_local[jj] = g_world_R[jj];
      g_joints[jj] += g_world_t[jj];
      continue;
    }
    const Mat3& Rp = f.world.rotation[p];
    const Vec3 offset = f.joints[jj] - f.joints[p];
    g_world_R[p] += g_world_R[jj] * f.local[jj].transpose() + g_world_t[jj] * offset.transpose();
    g_local[jj] = Rp.transpose() * g_world_R[jj];
    g_world_t[p] += g_world_t[jj];
    const Vec3 g_off = Rp.transpose() * g_world_t[jj];
    g_joints[jj] += g_off;
    g_joints[p] -= g_off;
  }
  for (std::size_t j = 0; j < K; ++j) {
    g.pose.segment<3>(static_cast<Eigen::Index>(3 * j)) =
        axis_angle_to_matrix_backward(params.pose.segment<3>(static_cast<Eigen::Index>(3 * j)), g_local[j]);
  }

  // Joint regression and shape blendshapes.
  for (std::size_t k = 0; k < K; ++k) {
    for (const auto& inf : model.regressor_row(k)) g_shaped[inf.joint] += inf.weight * g_joints[k];
  }
  if (model.num_shape() > 0) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(3 * V));
    for (std::size_t v = 0; v < V; ++v) flat.segment<3>(static_cast<Eigen::Index>(3 * v)) = g_shaped[v];
    g.shape = model.body_template().shape_basis.transpose() * flat;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Procedural template
// ---------------------------------------------------------------------------

namespace {

struct JointSpec {
  const char* name;
  int parent;
  Vec3 position;
  Vec3 bone_end;  // far end of the capsule hanging off this joint
  double radius;
  int group;      // shape-basis limb group
};

enum Group { kTorso = 0, kHead, kLeftArm, kRightArm, kLeftLeg, kRightLeg };

const std::array<JointSpec, kDefaultJoints>& humanoid() {
  static const std::array<JointSpec, kDefaultJoints> table = {{
      {"pelvis", -1, {0.0, 0.0, 0.0}, {0.0, -0.12, 0.0}, 0.13, kTorso},
      {"spine", 0, {0.0, -0.12, 0.0}, {0.0, -0.30, 0.0}, 0.13, kTorso},
      {"chest", 1, {0.0, -0.30, 0.0}, {0.0, -0.48, 0.0}, 0.14, kTorso},
      {"neck", 2, {0.0, -0.50, 0.0}, {0.0, -0.76, -0.01}, 0.09, kHead},
      {"left_shoulder", 2, {0.18, -0.45, 0.0}, {0.30, -0.20, 0.0}, 0.05, kLeftArm},
      {"left_elbow", 4, {0.30, -0.20, 0.0}, {0.40, 0.03, -0.03}, 0.04, kLeftArm},
      {"left_wrist", 5, {0.40, 0.03, -0.03}, {0.44, 0.17, -0.05}, 0.035, kLeftArm},
      {"right_shoulder", 2, {-0.18, -0.45, 0.0}, {-0.30, -0.20, 0.0}, 0.05, kRightArm},
      {"right_elbow", 7, {-0.30, -0.20, 0.0}, {-0.40, 0.03, -0.03}, 0.04, kRightArm},
      {"right_wrist", 8, {-0.40, 0.03, -0.03}, {-0.44, 0.17, -0.05}, 0.035, kRightArm},
      {"left_hip", 0, {0.09, 0.06, 0.0}, {0.10, 0.46, 0.0}, 0.07, kLeftLeg},
      {"left_knee", 10, {0.10, 0.46, 0.0}, {0.10, 0.86, 0.01}, 0.05, kLeftLeg},
      {"left_ankle", 11, {0.10, 0.86, 0.01}, {0.10, 0.90, -0.14}, 0.04, kLeftLeg},
      {"right_hip", 0, {-0.09, 0.06, 0.0}, {-0.10, 0.46, 0.0}, 0.07, kRightLeg},
      {"right_knee", 13, {-0.10, 0.46, 0.0}, {-0.10, 0.86, 0.01}, 0.05, kRightLeg},
      {"right_ankle", 14, {-0.10, 0.86, 0.01}, {-0.10, 0.90, -0.14}, 0.04, kRightLeg},
  }};
  return table;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b, Vec3* closest = nullptr) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  const Vec3 c = a + t * ab;
  if (closest) *closest = c;
  return (p - c).norm();
}

}  // namespace

const std::array<const char*, kDefaultJoints>& joint_names() {
  static const std::array<const char*, kDefaultJoints> names = [] {
    std::array<const char*, kDefaultJoints> n{};
    for (std::size_t j = 0; j < kDefaultJoints; ++j) n[j] = humanoid()[j].name;
    return n;
  }();
  return names;
}

BodyTemplate default_template(std::size_t V, std::size_t K, std::size_t B, std::uint64_t seed) {
  if (K < 2 || K > kDefaultJoints) throw Error(ErrorCode::InvalidConfig, "joint count must be in [2, 16]");
  if (V < K) throw Error(ErrorCode::InvalidConfig, "vertex count must be at least the joint count");
  if (B > kDefaultShapeDims) throw Error(ErrorCode::InvalidConfig, "at most 10 shape directions are available");
  const auto& spec = humanoid();

  // Allocate vertices to capsules by surface area, at least one each.
  std::vector<double> area(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double len = (spec[j].bone_end - spec[j].position).norm();
    area[j] = 2.0 * M_PI * spec[j].radius * len + 4.0 * M_PI * spec[j].radius * spec[j].radius;
  }
  const double total_area = std::accumulate(area.begin(), area.end(), 0.0);
  std::vector<std::size_t> count(K, 1);
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t assigned = K;
  for (std::size_t j = 0; j < K; ++j) {
    const double exact = static_cast<double>(V - K) * area[j] / total_area;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    count[j] += whole;
    assigned += whole;
    remainder.emplace_back(exact - static_cast<double>(whole), j);
  }
  std::stable_sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < V; ++r, ++assigned) ++count[remainder[r % K].second];

  BodyTemplate t;
  t.parents.resize(K);
  for (std::size_t j = 0; j < K; ++j) t.parents[j] = spec[j].parent;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> owner;
  for (std::size_t j = 0; j < K; ++j) {
    const Vec3 a = spec[j].position, b = spec[j].bone_end;
    const double len = (b - a).norm();
    const double r = spec[j].radius;
    const Vec3 axis = (b - a) / len;
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    const Vec3 e2 = axis.cross(e1);
    for (std::size_t i = 0; i < count[j]; ++i) {
      const double along = -r + unit(rng) * (len + 2.0 * r);
      const double over = along < 0.0 ? -along : (along > len ? along - len : 0.0);
      const double radial = std::sqrt(std::max(r * r - over * over, 0.0));
      const double phi = 2.0 * M_PI * unit(rng);
      t.rest_vertices.push_back(a + along * axis + radial * (std::cos(phi) * e1 + std::sin(phi) * e2));
      owner.push_back(static_cast<int>(j));
    }
  }

  // Skin weights: softmax of negative bone distance, top four kept.
  constexpr double kSkinFalloff = 0.02;
  t.skin_weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(K));
  for (std::size_t v = 0; v < V; ++v) {
    std::vector<std::pair<double, std::size_t>> dist(K);
    for (std::size_t j = 0; j < K; ++j) {
      dist[j] = {segment_distance(t.rest_vertices[v], spec[j].position, spec[j].bone_end), j};
    }
    std::stable_sort(dist.begin(), dist.end());
    const std::size_t keep = std::min<std::size_t>(4, K);
    double sum = 0.0;
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < keep; ++i) {
      w[i] = std::exp(-(dist[i].first - dist[0].first) / kSkinFalloff);
      sum += w[i];
    }
    for (std::size_t i = 0; i < keep; ++i) {
      const double wi = w[i] / sum;
      if (wi < 1e-6) continue;
      t.skin_weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(dist[i].second)) = wi;
    }
    t.skin_weights.row(static_cast<Eigen::Index>(v)) /= t.skin_weights.row(static_cast<Eigen::Index>(v)).sum();
  }

  // Joint regressor: Gaussian-weighted nearby surface vertices.
  constexpr double kRegressorSigma = 0.05;
  constexpr std::size_t kRegressorSupport = 24;
  t.joint_regressor = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
  for (std::size_t j = 0; j < K; ++j) {
    std::vector<std::pair<double, std::size_t>> dist(V);
    for (std::size_t v = 0; v < V; ++v) dist[v] = {(t.rest_vertices[v] - spec[j].position).squaredNorm(), v};
    const std::size_t keep = std::min(kRegressorSupport, V);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(keep), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < keep; ++i) sum += std::exp(-dist[i].first / (2.0 * kRegressorSigma * kRegressorSigma));
    for (std::size_t i = 0; i < keep; ++i) {
      t.joint_regressor(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(dist[i].second)) =
          std::exp(-dist[i].first / (2.0 * kRegressorSigma * kRegressorSigma)) / sum;
    }
    t.joint_regressor.row(static_cast<Eigen::Index>(j)) /= t.joint_regressor.row(static_cast<Eigen::Index>(j)).sum();
  }

  // Shape basis: global size, height, girth, then per-limb scaling.
  constexpr double kScaleStep = 0.03;
  constexpr double kGirthStep = 0.01;
  t.shape_basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(3 * V), static_cast<Eigen::Index>(B));
  auto set = [&](std::size_t b, std::size_t v, const Vec3& d) {
    if (b < B) t.shape_basis.block<3, 1>(static_cast<Eigen::Index>(3 * v), static_cast<Eigen::Index>(b)) = d;
  };
  const std::array<int, 6> group_anchor = {0, 3, 4, 7, 10, 13};
  for (std::size_t v = 0; v < V; ++v) {
    const Vec3& p = t.rest_vertices[v];
    const int j = owner[v];
    Vec3 closest;
    segment_distance(p, spec[j].position, spec[j].bone_end, &closest);
    const Vec3 radial = (p - closest).norm() > 1e-12 ? Vec3((p - closest).normalized()) : Vec3::Zero();
    set(0, v, kScaleStep * p);
    set(1, v, kScaleStep * Vec3(0.0, p.y(), 0.0));
    set(2, v, kGirthStep * radial);
    const int group = spec[j].group;
    const int anchor = group_anchor[group];
    const Vec3 from_anchor = p - spec[anchor].position;
    switch (group) {
      case kLeftArm: set(3, v, kScaleStep * from_anchor); break;
      case kRightArm: set(4, v, kScaleStep * from_anchor); break;
      case kLeftLeg: set(5, v, kScaleStep * from_anchor); break;
      case kRightLeg: set(6, v, kScaleStep * from_anchor); break;
      case kTorso: set(7, v, kScaleStep * from_anchor); break;
      case kHead: set(8, v, kScaleStep * from_anchor); break;
    }
    if (group == kLeftArm || group == kRightArm || j == 2) set(9, v, kScaleStep * Vec3(p.x(), 0.0, 0.0));
  }

  t.validate();
  return t;
}

}  // namespace intertrack
