// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "intertrack/error.hpp"
#include "intertrack/joint_refine.hpp"
#include "oracles.hpp"

using namespace intertrack;
using namespace intertrack::testing;

namespace {

const BodyModel& small_model() {
  static const BodyModel model(default_template(96, 16, 4, 9));
  return model;
}

Camera small_camera() {
  Camera c;
  c.fx = c.fy = 40.0;
  c.cx = c.cy = 12.0;
  c.width = c.height = 24;
  return c;
}

struct Scene {
  SequenceBundle bundle;
  HumanTrack human;
  ObjectTrack object;
};

// Human and object next to each other; bundle clouds are noisy copies of the tracks.
Scene random_scene(std::mt19937_64& rng, std::size_t T, double pose_scale, double noise) {
  const auto& m = small_model();
  Scene s;
  s.bundle.camera = small_camera();
  std::uniform_real_distribution<double> u(-pose_scale, pose_scale);
  std::normal_distribution<double> n(0.0, noise);
  s.human.mean_shape = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_shape()));
  s.object.canonical = random_cloud(rng, 24, 0.08);
  for (std::size_t i = 0; i < T; ++i) {
    HumanFrame f;
    f.pose = Eigen::VectorXd(static_cast<Eigen::Index>(3 * m.num_joints()));
    for (auto& v : f.pose) v = u(rng);
    f.translation = Vec3(-0.1, 0.0, 2.0) + random_vec(rng, 0.01);
    s.human.frames.push_back(f);
    SimilarityPose p;
    p.rotation = random_rotation(rng);
    p.translation = Vec3(0.15, 0.0, 2.0) + random_vec(rng, 0.01);
    s.object.poses.push_back(p);

    FrameData fd;
    auto hv = posed_vertices(m, s.human.params(i));
    auto ov = s.object.posed(i);
    for (auto& v : hv) v += Vec3(n(rng), n(rng), n(rng));
    for (auto& v : ov) v += Vec3(n(rng), n(rng), n(rng));
    fd.human = PointCloud(hv);
    fd.object = PointCloud(ov);
    fd.object_mask = rasterize_soft_mask(fd.object, s.bundle.camera, 2.0);
    for (auto& v : fd.object_mask.values) v = v >= 0.5 ? 1.0 : 0.0;
    fd.human_mask = SoftMask(s.bundle.camera.width, s.bundle.camera.height);
    s.bundle.frames.push_back(std::move(fd));
  }
  return s;
}

ContactSet random_contacts(std::mt19937_64& rng, std::size_t T, std::size_t V, std::size_t N, std::size_t per_frame) {
  ContactSet c;
  std::uniform_int_distribution<std::size_t> hv(0, V - 1), op(0, N - 1);
  for (std::size_t i = 0; i < T; ++i) {
    FrameContacts f;
    for (std::size_t k = 0; k < per_frame; ++k) f.pairs.push_back({hv(rng), op(rng)});
    c.frames.push_back(f);
  }
  return c;
}

std::vector<ContactMatch> brute_contacts(std::span<const Vec3> h, std::span<const Vec3> o, double delta) {
  std::vector<ContactMatch> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::size_t j = 0;
    const double d2 = brute_nearest_sq(o, h[i], &j);
    if (std::sqrt(d2) < delta) out.push_back({i, j, std::sqrt(d2)});
  }
  return out;
}

// Free refinement parameters: body poses, then object rotation entries.
Eigen::VectorXd pack(const HumanTrack& h, const ObjectTrack& o) {
  const Eigen::Index P = h.frames[0].pose.size();
  Eigen::VectorXd x(static_cast<Eigen::Index>(h.size()) * P + 9 * static_cast<Eigen::Index>(o.size()));
  Eigen::Index k = 0;
  for (const auto& f : h.frames) {
    x.segment(k, P) = f.pose;
    k += P;
  }
  for (const auto& p : o.poses) {
    x.segment<9>(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(p.rotation.data());
    k += 9;
  }
  return x;
}

void unpack(HumanTrack& h, ObjectTrack& o, const Eigen::VectorXd& x) {
  const Eigen::Index P = h.frames[0].pose.size();
  Eigen::Index k = 0;
  for (auto& f : h.frames) {
    f.pose = x.segment(k, P);
    k += P;
  }
  for (auto& p : o.poses) {
    p.rotation = Eigen::Map<const Mat3>(x.segment<9>(k).data());
    k += 9;
  }
}

}  // namespace

TEST_CASE("contact discovery") {
  std::mt19937_64 rng(1);
  const auto h = random_cloud(rng, 100, 0.1);
  std::vector<Vec3> far = random_cloud(rng, 80, 0.1, Vec3(1.0, 0.0, 0.0));
  CHECK(find_contacts(h, far, 0.02).empty());

  std::vector<Vec3> touching = far;
  touching[7] = h[3];
  const auto c = find_contacts(h, touching, 0.02);
  REQUIRE(c.size() == 1);
  CHECK(c[0].human == 3);
  CHECK(c[0].object == 7);
  CHECK(c[0].distance == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cloud(rng, 150, 0.1);
    const auto b = random_cloud(rng, 120, 0.1, Vec3(0.12, 0.0, 0.0));
    const auto got = find_contacts(a, b, 0.03);
    const auto want = brute_contacts(a, b, 0.03);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].human == want[k].human);
      CHECK(got[k].object == want[k].object);
      CHECK(got[k].distance == doctest::Approx(want[k].distance).epsilon(1e-12));
    }
    // A smaller threshold selects a subset.
    const auto tight = find_contacts(a, b, 0.015);
    for (const auto& t : tight) {
      CHECK(t.distance < 0.015);
      CHECK(std::any_of(got.begin(), got.end(), [&](const ContactMatch& g) { return g.human == t.human; }));
    }
  }
  try {
    find_contacts(std::vector<Vec3>{}, h, 0.02);
    FAIL("expected EmptyCloud");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCloud);
  }
}

TEST_CASE("contact transfer") {
  std::mt19937_64 rng(2);
  const auto h = random_cloud(rng, 60, 0.1);
  const auto o = random_cloud(rng, 60, 0.1, Vec3(0.15, 0.0, 0.0));
  const auto found = find_contacts(h, o, 0.05);
  REQUIRE(!found.empty());

  const auto same = transfer_contacts(found, h, o, h, o);
  REQUIRE(same.pairs.size() == found.size());
  for (std::size_t k = 0; k < found.size(); ++k) {
    CHECK(same.pairs[k].human_vertex == found[k].human);
    CHECK(same.pairs[k].object_point == found[k].object);
    CHECK(same.human_locations[k] == h[found[k].human]);
    CHECK(same.object_locations[k] == o[found[k].object]);
  }

  std::vector<Vec3> moved = h;
  for (auto& p : moved) p += Vec3(0.001, 0.0, 0.0);
  const auto shifted = transfer_contacts(found, h, o, moved, o);
  for (std::size_t k = 0; k < found.size(); ++k) CHECK(shifted.pairs[k].human_vertex == found[k].human);

  // Duplicated optimised points: the lowest index wins.
  std::vector<Vec3> dup{h[0], h[0], h[0]};
  const std::vector<ContactMatch> one{{0, 0, 0.0}};
  CHECK(transfer_contacts(one, h, o, dup, o).pairs[0].human_vertex == 0);
}

TEST_CASE("contact term value and gradient") {
  std::mt19937_64 rng(3);
  const auto h = random_cloud(rng, 20, 0.1);
  const auto o = random_cloud(rng, 15, 0.1);
  FrameContacts fc;
  fc.pairs = {{2, 4}, {5, 5}, {2, 9}};
  const auto r = contact_term(fc, h, o, 10.0);
  double expected = 0.0;
  for (const auto& p : fc.pairs) expected += 10.0 * (h[p.human_vertex] - o[p.object_point]).squaredNorm();
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-14));

  Eigen::VectorXd x(3 * 35);
  x << flatten(h), flatten(o);
  const auto fd = central_difference(
      [&](const Eigen::VectorXd& v) {
        const auto hh = unflatten(v.head(60));
        const auto oo = unflatten(v.tail(45));
        return contact_term(fc, hh, oo, 10.0).value;
      },
      x);
  Eigen::VectorXd g(3 * 35);
  g << flatten(r.human_grad), flatten(r.object_grad);
  CHECK(relative_error(g, fd) < 1e-6);

  std::vector<Vec3> oo = o;
  for (const auto& p : fc.pairs) oo[p.object_point] = h[p.human_vertex];
  FrameContacts coincident;
  coincident.pairs = {{2, 4}, {5, 5}};
  CHECK(contact_term(coincident, h, oo, 10.0).value == 0.0);
}

TEST_CASE("joint loss decomposes into its parts") {
  std::mt19937_64 rng(4);
  const HumanFitConfig ch;
  const ObjectFitConfig co;
  const JointConfig cj;
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = random_scene(rng, 4, 0.3, 0.003);
    const auto targets = joint_targets(s.bundle);
    const double h = human_loss(small_model(), s.human, targets.human, ch, false).value;
    const double o = object_loss(s.object, targets.object, s.bundle, co, false).value;

    ContactSet none;
    none.frames.resize(4);
    const auto e = joint_loss(small_model(), s.human, s.object, none, targets, s.bundle, ch, co, cj, false);
    CHECK(std::abs(e.value - (h + o)) <= 1e-12 * std::max(1.0, h + o));
    CHECK(e.contact == 0.0);

    const auto contacts = random_contacts(rng, 4, small_model().num_vertices(), s.object.canonical.size(), 5);
    const auto r = joint_loss(small_model(), s.human, s.object, contacts, targets, s.bundle, ch, co, cj, false);
    double c = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto hv = posed_vertices(small_model(), s.human.params(i));
      const auto ov = s.object.posed(i);
      for (const auto& p : contacts.frames[i].pairs)
        c += cj.lambda_contact * (hv[p.human_vertex] - ov[p.object_point]).squaredNorm();
    }
    CHECK(r.contact == doctest::Approx(c).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(h + o + c).epsilon(1e-12));
    CHECK(r.value >= h + o);
  }
}

TEST_CASE("joint loss gradient matches finite differences") {
  std::mt19937_64 rng(5);
  HumanFitConfig ch;
  ch.lambda_cd = 1.0;
  ch.lambda_acc = 1.0;
  ch.lambda_prior = 0.1;
  ObjectFitConfig co;
  co.lambda_cd = 1.0;
  co.lambda_occ = 0.5;
  co.lambda_acc_points = 1.0;
  co.lambda_acc_rotation = 1.0;
  const JointConfig cj;
  for (int trial = 0; trial < 2; ++trial) {
    const auto s = random_scene(rng, 3, 0.3, 0.003);
    const auto targets = joint_targets(s.bundle);
    const auto contacts = random_contacts(rng, 3, small_model().num_vertices(), s.object.canonical.size(), 4);
    const auto r = joint_loss(small_model(), s.human, s.object, contacts, targets, s.bundle, ch, co, cj, true);
    HumanTrack gh;
    gh.frames = r.human.grad.frames;
    ObjectTrack go;
    for (const auto& pg : r.object.grad.poses) {
      SimilarityPose p;
      p.rotation = pg.rotation;
      go.poses.push_back(p);
    }
    const auto f = [&](const Eigen::VectorXd& x) {
      HumanTrack h = s.human;
      ObjectTrack o = s.object;
      unpack(h, o, x);
      return joint_loss(small_model(), h, o, contacts, targets, s.bundle, ch, co, cj, false).value;
    };
    CHECK(relative_error(pack(gh, go), central_difference(f, pack(s.human, s.object))) < 1e-4);
  }
}

TEST_CASE("contact set validation") {
  ContactSet c;
  c.frames.resize(2);
  c.frames[1].pairs.push_back({3, 4});
  CHECK(c.pair_count() == 1);
  CHECK_NOTHROW(c.validate(10, 10));
  try {
    c.validate(3, 10);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
  JointConfig bad;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("refinement without contacts leaves an exact fit in place") {
  // Static scene, rest body pose and exactly matching targets and masks.
  const auto& m = small_model();
  std::mt19937_64 rng(6);
  Scene s;
  s.bundle.camera = small_camera();
  s.human.mean_shape = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_shape()));
  s.object.canonical = random_cloud(rng, 24, 0.08);
  HumanFrame hf;
  hf.pose = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * m.num_joints()));
  hf.translation = Vec3(-0.3, 0.0, 2.0);
  SimilarityPose op;
  op.rotation = random_rotation(rng);
  op.translation = Vec3(0.3, 0.0, 2.0);
  for (int i = 0; i < 4; ++i) {
    s.human.frames.push_back(hf);
    s.object.poses.push_back(op);
    FrameData fd;
    fd.human = PointCloud(posed_vertices(m, s.human.params(0)));
    fd.object = PointCloud(s.object.posed(0));
    fd.object_mask = rasterize_soft_mask(fd.object, s.bundle.camera, 2.0);
    fd.human_mask = SoftMask(s.bundle.camera.width, s.bundle.camera.height);
    s.bundle.frames.push_back(fd);
  }
  JointConfig cj;
  cj.steps = 300;
  const auto r = refine_joint(m, s.human, s.object, s.bundle, HumanFitConfig{}, ObjectFitConfig{}, cj);
  CHECK(r.contacts.empty());
  CHECK((pack(r.human, r.object) - pack(s.human, s.object)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("refinement moves only body poses and object rotations") {
  std::mt19937_64 rng(7);
  const auto s = random_scene(rng, 5, 0.2, 0.003);
  JointConfig cj;
  cj.steps = 40;
  cj.delta = 0.1;
  const auto a = refine_joint(small_model(), s.human, s.object, s.bundle, HumanFitConfig{}, ObjectFitConfig{}, cj);
  CHECK(!a.contacts.empty());
  CHECK(a.human.mean_shape == s.human.mean_shape);
  CHECK(a.object.canonical == s.object.canonical);
  bool moved = false;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.human.frames[i].translation == s.human.frames[i].translation);
    CHECK(a.human.frames[i].log_scale == s.human.frames[i].log_scale);
    CHECK(a.object.poses[i].translation == s.object.poses[i].translation);
    CHECK(a.object.poses[i].log_scale == s.object.poses[i].log_scale);
    moved = moved || a.human.frames[i].pose != s.human.frames[i].pose;
  }
  CHECK(moved);
  const auto b = refine_joint(small_model(), s.human, s.object, s.bundle, HumanFitConfig{}, ObjectFitConfig{}, cj);
  CHECK(pack(a.human, a.object) == pack(b.human, b.object));
}
