// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/rotation.hpp"
#include "intertrack/synth.hpp"
#include "oracles.hpp"

using namespace intertrack;
using namespace intertrack::testing;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c;
  c.frames = 6;
  c.object_points = 64;
  c.dense_points = 256;
  c.human_points = 128;
  c.template_vertices = 256;
  c.seed = seed;
  return c;
}

bool same_cloud(const PointCloud& a, const PointCloud& b) { return a.points == b.points; }

bool same_mask(const SoftMask& a, const SoftMask& b) {
  return a.width == b.width && a.height == b.height && a.values == b.values;
}

std::vector<std::array<double, 3>> sorted_points(std::span<const Vec3> pts) {
  std::vector<std::array<double, 3>> out;
  for (const auto& p : pts) out.push_back({p.x(), p.y(), p.z()});
  std::sort(out.begin(), out.end());
  return out;
}

bool contains(std::span<const Vec3> set, const Vec3& p) {
  return std::any_of(set.begin(), set.end(), [&](const Vec3& q) { return q == p; });
}

}  // namespace

TEST_CASE("sequence generation is deterministic per seed") {
  const auto a = gen_sequence(small_config(3));
  const auto b = gen_sequence(small_config(3));
  REQUIRE(a.bundle.size() == b.bundle.size());
  for (std::size_t i = 0; i < a.bundle.size(); ++i) {
    const auto& fa = a.bundle.frames[i];
    const auto& fb = b.bundle.frames[i];
    CHECK(same_cloud(fa.human, fb.human));
    CHECK(same_cloud(fa.object, fb.object));
    CHECK(same_mask(fa.object_mask, fb.object_mask));
    CHECK(same_mask(fa.human_mask, fb.human_mask));
    CHECK(fa.rotation_estimate == fb.rotation_estimate);
    CHECK(fa.visibility == fb.visibility);
    CHECK(a.truth.poses[i].rotation == b.truth.poses[i].rotation);
    CHECK(a.truth.body[i].pose == b.truth.body[i].pose);
  }
  CHECK(a.truth.canonical == b.truth.canonical);
  const auto c = gen_sequence(small_config(4));
  CHECK(!same_cloud(a.bundle.frames[0].object, c.bundle.frames[0].object));
}

TEST_CASE("noiseless unshuffled clouds are exact ground-truth samples") {
  auto cfg = small_config(5);
  cfg.noise = 0.0;
  cfg.shuffle = false;
  const auto r = gen_sequence(cfg);
  const BodyModel model(*r.bundle.body_template);
  for (std::size_t i = 0; i < cfg.frames; ++i) {
    const auto dense = apply_similarity(r.truth.canonical, r.truth.poses[i]);
    const auto verts = posed_vertices(model, r.truth.body[i]);
    for (const auto& p : r.bundle.frames[i].object.points) CHECK(contains(dense, p));
    for (const auto& p : r.bundle.frames[i].human.points) CHECK(contains(verts, p));
  }
}

TEST_CASE("shuffled clouds are permutations of unshuffled ones") {
  auto cfg = small_config(6);
  const auto shuffled = gen_sequence(cfg);
  cfg.shuffle = false;
  const auto ordered = gen_sequence(cfg);
  for (std::size_t i = 0; i < cfg.frames; ++i) {
    CHECK(sorted_points(shuffled.bundle.frames[i].object.points) ==
          sorted_points(ordered.bundle.frames[i].object.points));
    CHECK(sorted_points(shuffled.bundle.frames[i].human.points) ==
          sorted_points(ordered.bundle.frames[i].human.points));
  }
}

TEST_CASE("ground-truth poses reproduce the noiseless clouds") {
  const auto r = gen_sequence(small_config(7));
  for (std::size_t i = 0; i < r.truth.poses.size(); ++i) {
    const auto& pose = r.truth.poses[i];
    CHECK(pose.log_scale == 0.0);
    const auto dense = apply_similarity(r.truth.canonical, pose);
    for (std::size_t j = 0; j < dense.size(); j += 17) {
      const Vec3 direct = pose.rotation * r.truth.canonical[j] + pose.translation;
      CHECK((dense[j] - direct).norm() < 1e-12);
      CHECK(dense[j].z() > 0.0);
    }
  }
}

TEST_CASE("occluded frames are less visible") {
  auto cfg = small_config(8);
  cfg.frames = 12;
  cfg.occluded_fraction = 0.5;
  cfg.occlusion_level = 0.7;
  const auto r = gen_sequence(cfg);
  double max_occ = 0.0, min_free = 1.0;
  std::size_t n_occ = 0;
  for (std::size_t i = 0; i < cfg.frames; ++i) {
    const double v = r.bundle.frames[i].visibility;
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (r.truth.occluded[i]) {
      ++n_occ;
      max_occ = std::max(max_occ, v);
    } else {
      min_free = std::min(min_free, v);
    }
  }
  CHECK(n_occ == 6);
  CHECK(max_occ <= 0.3 + 1e-12);
  CHECK(max_occ < min_free);
}

TEST_CASE("masks are binary") {
  auto cfg = small_config(9);
  cfg.occluded_fraction = 0.5;
  const auto r = gen_sequence(cfg);
  for (const auto& f : r.bundle.frames) {
    for (double v : f.object_mask.values) CHECK((v == 0.0 || v == 1.0));
    for (double v : f.human_mask.values) CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("trajectory") {
  TrajectoryConfig cfg;
  cfg.rotation_controls = 3;
  const auto a = gen_trajectory(40, 11, cfg);
  const auto b = gen_trajectory(40, 11, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rotation == b[i].rotation);
    CHECK(a[i].translation == b[i].translation);
    CHECK(is_rotation(a[i].rotation, 1e-9));
  }

  // Per-segment slerp between control rotations, computed with quaternions.
  const auto controls = trajectory_controls(40, 11, cfg);
  const double M1 = static_cast<double>(controls.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double seg = static_cast<double>(i) / 39.0 * M1;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(seg), controls.size() - 2);
    const Eigen::Quaterniond q0(controls[k]), q1(controls[k + 1]);
    const Mat3 want = q0.slerp(seg - static_cast<double>(k), q1).toRotationMatrix();
    CHECK(geodesic_angle(a[i].rotation, want) < 1e-7);
  }
  CHECK(deg(geodesic_angle(a.front().rotation, a.back().rotation)) <= cfg.max_sweep_deg + 1e-9);

  std::vector<Vec3> t;
  for (const auto& p : a) t.push_back(p.translation);
  CHECK(acceleration_loss(std::span<const Vec3>(t)).value <= 1e-20);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK((t[i] - t[i - 1]).norm() <= cfg.max_speed + 1e-12);
  for (const auto& p : t) CHECK(((p - cfg.box_center).cwiseAbs() - cfg.box_half).maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(gen_trajectory(2, 1), Error);
}

TEST_CASE("body motion") {
  const BodyModel model(default_template(256, kDefaultJoints, kDefaultShapeDims, 0));
  BodyMotionConfig cfg;
  cfg.root_drift = 0.0;
  cfg.amplitude = 0.0;
  const auto rest = gen_body_motion(model, 10, 3, cfg);
  for (const auto& p : rest) {
    CHECK(p.pose.isZero(0.0));
    CHECK(p.shape == rest[0].shape);
    CHECK(p.shape.cwiseAbs().maxCoeff() <= 2.0);
  }

  cfg.amplitude = 0.6;
  const auto full = gen_body_motion(model, 30, 3, cfg);
  const auto again = gen_body_motion(model, 30, 3, cfg);
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].pose == again[i].pose);
    CHECK(full[i].pose.cwiseAbs().maxCoeff() <= 0.6);
  }

  // Vertex acceleration shrinks with the amplitude.
  double previous = std::numeric_limits<double>::infinity();
  for (double amp : {0.6, 0.3, 0.1, 0.0}) {
    cfg.amplitude = amp;
    const auto motion = gen_body_motion(model, 30, 3, cfg);
    std::vector<std::vector<Vec3>> verts;
    for (const auto& p : motion) verts.push_back(posed_vertices(model, p));
    const double acc = acceleration_loss(std::span<const std::vector<Vec3>>(verts)).value;
    CHECK(std::isfinite(acc));
    CHECK(acc < previous);
    previous = acc;
  }
  CHECK(previous < 1e-20);
}

TEST_CASE("rotation window simulation") {
  std::mt19937_64 rng(12);
  std::vector<Mat3> gt;
  for (int i = 0; i < 20; ++i) gt.push_back(random_rotation(rng));
  const auto windows = simulate_window_predictions(gt, 8, 1, 10.0, 5);
  CHECK(windows.size() == 13);
  for (const auto& w : windows) {
    REQUIRE(w.rotations.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) CHECK(deg(geodesic_angle(w.rotations[k], gt[w.start + k])) == doctest::Approx(10.0));
  }
  const auto single = single_window_predictions(windows, 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(deg(geodesic_angle(single[i], gt[i])) == doctest::Approx(10.0));
}

TEST_CASE("contact schedule pins the hand to the object") {
  auto cfg = small_config(13);
  cfg.frames = 10;
  cfg.contact = true;
  cfg.contact_offset = 0.005;
  const auto r = gen_sequence(cfg);
  REQUIRE(!r.truth.hand_vertices.empty());
  CHECK(r.truth.contact_frames.begin == 0);
  CHECK(r.truth.contact_frames.end == 10);
  const BodyModel model(*r.bundle.body_template);
  for (std::size_t i = 0; i < cfg.frames; ++i) {
    const auto verts = posed_vertices(model, r.truth.body[i]);
    const Vec3 face = r.truth.poses[i].apply(r.truth.canonical[r.truth.contact_point]);
    double best = std::numeric_limits<double>::infinity();
    for (const auto v : r.truth.hand_vertices) best = std::min(best, (verts[v] - face).norm());
    CHECK(best <= cfg.contact_offset + 1e-9);
  }
}

TEST_CASE("invalid configurations") {
  auto expect_invalid = [](const SynthConfig& c) {
    try {
      gen_sequence(c);
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
  };
  auto c = small_config(1);
  c.frames = 2;
  expect_invalid(c);
  c = small_config(1);
  c.object_points = 8;
  expect_invalid(c);
  c = small_config(1);
  c.noise = -1.0;
  expect_invalid(c);
  c = small_config(1);
  c.body.amplitude = 0.7;
  expect_invalid(c);
  CHECK_THROWS_AS(parse_object_kind("sphere"), Error);
  for (auto k : {ObjectKind::Box, ObjectKind::Cylinder, ObjectKind::LShape, ObjectKind::Blob}) {
    CHECK(parse_object_kind(to_string(k)) == k);
    const auto pts = sample_object_surface(k, 200, 1);
    CHECK(pts.size() == 200);
    Vec3 c0 = Vec3::Zero();
    for (const auto& p : pts) c0 += p;
    CHECK((c0 / 200.0).norm() < 1e-12);
  }
}
