// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Simplified SMPL-style articulated body: linear shape blendshapes, forward
// kinematics over a fixed joint tree, and linear blend skinning.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "intertrack/types.hpp"

namespace intertrack {

struct BodyTemplate {
  std::vector<Vec3> rest_vertices;   ///< V rest positions (meters)
  std::vector<int> parents;          ///< K entries, parents[0] == -1, parents[j] < j
  Eigen::MatrixXd joint_regressor;   ///< K x V, non-negative rows summing to 1
  Eigen::MatrixXd skin_weights;      ///< V x K, at most 4 non-zeros per row, rows sum to 1
  Eigen::MatrixXd shape_basis;       ///< 3V x B; column b is a flattened displacement field

  std::size_t num_vertices() const { return rest_vertices.size(); }
  std::size_t num_joints() const { return parents.size(); }
  std::size_t num_shape() const { return static_cast<std::size_t>(shape_basis.cols()); }

  /// Throws InvalidConfig describing the first violated invariant.
  void validate() const;
};

/// Per-frame body parameters: axis-angle pose (3K), shape (B), similarity.
struct BodyParams {
  Eigen::VectorXd pose;
  Eigen::VectorXd shape;
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;

  static BodyParams zeros(std::size_t joints, std::size_t shape_dims) {
    BodyParams p;
    p.pose = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * joints));
    p.shape = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape_dims));
    return p;
  }
};

/// Validated, immutable body model with sparse views of the template.
class BodyModel {
 public:
  explicit BodyModel(BodyTemplate tmpl);

  const BodyTemplate& body_template() const noexcept { return tmpl_; }
  std::size_t num_vertices() const noexcept { return tmpl_.num_vertices(); }
  std::size_t num_joints() const noexcept { return tmpl_.num_joints(); }
  std::size_t num_shape() const noexcept { return tmpl_.num_shape(); }

  std::vector<Vec3> shaped_vertices(const Eigen::VectorXd& shape) const;
  std::vector<Vec3> regress_joints(std::span<const Vec3> vertices) const;

  struct Influence {
    std::uint32_t joint;
    double weight;
  };
  std::span<const Influence> influences(std::size_t vertex) const;
  std::span<const Influence> regressor_row(std::size_t joint) const;

 private:
  BodyTemplate tmpl_;
  std::vector<std::uint32_t> skin_start_;
  std::vector<Influence> skin_;
  std::vector<std::uint32_t> reg_start_;
  std::vector<Influence> reg_;  // joint field holds the vertex index
};

/// World transform of every joint frame (rotation and joint position).
struct JointTransforms {
  std::vector<Mat3> rotation;
  std::vector<Vec3> translation;
};

JointTransforms forward_kinematics(const BodyModel& model, const Eigen::VectorXd& pose,
                                   const Eigen::VectorXd& shape);

/// s * LBS(pose, shape) + t, in template vertex order.
std::vector<Vec3> posed_vertices(const BodyModel& model, const BodyParams& params);

struct BodyParamsGrad {
  Eigen::VectorXd pose;
  Eigen::VectorXd shape;
  Vec3 translation = Vec3::Zero();
  double log_scale = 0.0;
};

BodyParamsGrad posed_vertices_backward(const BodyModel& model, const BodyParams& params,
                                       std::span<const Vec3> grad_vertices);

inline constexpr std::size_t kDefaultJoints = 16;
inline constexpr std::size_t kDefaultShapeDims = 10;
inline constexpr std::size_t kDefaultVertices = 1024;

/// Joint names of the 16-joint humanoid, in tree order.
const std::array<const char*, kDefaultJoints>& joint_names();

/// Deterministic capsule-limb humanoid (camera convention: up is -y, the body
/// faces -z). Keeps the first K joints of the 16-joint tree and the first B
/// shape directions. Throws InvalidConfig unless V >= K >= 2, K <= 16, B <= 10.
BodyTemplate default_template(std::size_t vertices = kDefaultVertices, std::size_t joints = kDefaultJoints,
                              std::size_t shape_dims = kDefaultShapeDims, std::uint64_t seed = 0);

}  // namespace intertrack
