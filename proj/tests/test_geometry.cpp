// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/rotation.hpp"
#include "oracles.hpp"

using namespace intertrack;
using namespace intertrack::testing;

namespace {

// Nearest-index assignment in both directions, from the brute-force oracle.
std::vector<std::size_t> assignment(std::span<const Vec3> a, std::span<const Vec3> b) {
  std::vector<std::size_t> out;
  for (const auto& p : a) {
    std::size_t i = 0;
    brute_nearest_sq(b, p, &i);
    out.push_back(i);
  }
  for (const auto& q : b) {
    std::size_t i = 0;
    brute_nearest_sq(a, q, &i);
    out.push_back(i);
  }
  return out;
}

// Direct per-pixel evaluation of the splat opacity.
double oracle_pixel(std::span<const Vec3> pts, const Camera& cam, double radius, int x, int y) {
  double keep = 1.0;
  const double sigma = radius / 2.0;
  for (const auto& p : pts) {
    const double u = cam.fx * p.x() / p.z() + cam.cx;
    const double v = cam.fy * p.y() / p.z() + cam.cy;
    const double d = std::hypot(x - u, y - v);
    if (d >= 2.0 * radius) continue;
    keep *= 1.0 - taper_oracle(d, sigma, 2.0 * radius);
  }
  return 1.0 - keep;
}

std::vector<bool> support_pattern(std::span<const Vec3> pts, const Camera& cam, double radius) {
  std::vector<bool> out;
  for (const auto& p : pts) {
    const double u = cam.fx * p.x() / p.z() + cam.cx;
    const double v = cam.fy * p.y() / p.z() + cam.cy;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) out.push_back(std::hypot(x - u, y - v) <= 2.0 * radius);
    }
  }
  return out;
}

Camera small_camera() {
  Camera cam;
  cam.fx = cam.fy = 20.0;
  cam.cx = cam.cy = 7.5;
  cam.width = cam.height = 16;
  return cam;
}

}  // namespace

TEST_CASE("chamfer distance basics") {
  const std::vector<Vec3> a{{0, 0, 0}}, b{{0, 0, 1}};
  CHECK(chamfer_distance(a, b).value == doctest::Approx(2.0));
  std::mt19937_64 rng(1);
  const auto c = random_cloud(rng, 50);
  CHECK(chamfer_distance(c, c).value == 0.0);
  CHECK_THROWS_AS(chamfer_distance(std::vector<Vec3>{}, c), Error);
}

TEST_CASE("chamfer is symmetric and positive for disjoint clouds") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_cloud(rng, 40 + t * 30, 0.5);
    const auto b = random_cloud(rng, 30 + t * 25, 0.5, Vec3(0.1, 0.0, 0.0));
    const double ab = chamfer_distance(a, b).value;
    const double ba = chamfer_distance(b, a).value;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(ab > 0.0);
    CHECK(ab == doctest::Approx(brute_chamfer(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("chamfer equals brute force and its gradient matches finite differences") {
  std::mt19937_64 rng(3);
  int tested = 0;
  while (tested < 100) {
    const auto a = random_cloud(rng, 64);
    const auto b = random_cloud(rng, 64);
    const auto res = chamfer_distance(a, b);
    CHECK(std::abs(res.value - brute_chamfer(a, b)) < 1e-10);

    const Eigen::VectorXd x = flatten(a);
    const auto base = assignment(a, b);
    bool stable = true;
    auto f = [&](const Eigen::VectorXd& xp) {
      const auto pts = unflatten(xp);
      if (assignment(pts, b) != base) stable = false;
      return chamfer_distance(pts, b, false).value;
    };
    const Eigen::VectorXd numeric = central_difference(f, x);
    if (!stable) continue;  // nearest-neighbour switch inside the stencil: not differentiable there
    CHECK(relative_error(flatten(res.grad), numeric) < 1e-4);
    ++tested;
  }
}

TEST_CASE("chamfer through the grid path matches brute force") {
  std::mt19937_64 rng(4);
  const auto a = random_cloud(rng, 900, 0.3);
  const auto b = random_cloud(rng, 1200, 0.3, Vec3(0.02, 0.0, 0.0));
  CHECK(std::abs(chamfer_distance(a, b).value - brute_chamfer(a, b)) < 1e-12);
}

TEST_CASE("acceleration loss") {
  std::vector<Vec3> linear;
  for (int t = 0; t < 6; ++t) linear.push_back(Vec3(1, 2, 3) + t * Vec3(0.1, -0.2, 0.3));
  CHECK(acceleration_loss(std::span<const Vec3>(linear)).value < 1e-28);

  const Vec3 acc(0.3, -0.1, 0.2);
  const int T = 9;
  std::vector<Vec3> quad;
  for (int t = 0; t < T; ++t) quad.push_back(0.5 * acc * t * t);
  CHECK(acceleration_loss(std::span<const Vec3>(quad)).value == doctest::Approx((T - 2) * acc.squaredNorm()));

  CHECK_THROWS_AS(acceleration_loss(std::span<const double>(std::vector<double>{1.0, 2.0})), Error);

  // Direct-formula oracle on random sequences of each element type.
  std::mt19937_64 rng(5);
  std::vector<double> s(5);
  std::vector<Mat3> m(5);
  std::vector<std::vector<Vec3>> clouds(5);
  for (int t = 0; t < 5; ++t) {
    s[t] = random_vec(rng)[0];
    m[t] = random_rotation(rng);
    clouds[t] = random_cloud(rng, 7);
  }
  double es = 0.0, em = 0.0, ec = 0.0;
  for (int t = 2; t < 5; ++t) {
    es += std::pow(s[t] - 2 * s[t - 1] + s[t - 2], 2);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) em += std::pow(m[t](r, c) - 2 * m[t - 1](r, c) + m[t - 2](r, c), 2);
    for (int k = 0; k < 7; ++k) ec += (clouds[t][k] - 2 * clouds[t - 1][k] + clouds[t - 2][k]).squaredNorm();
  }
  CHECK(std::abs(acceleration_loss(std::span<const double>(s)).value - es) < 1e-12);
  CHECK(std::abs(acceleration_loss(std::span<const Mat3>(m)).value - em) < 1e-12);
  CHECK(std::abs(acceleration_loss(std::span<const std::vector<Vec3>>(clouds)).value - ec) < 1e-12);
}

TEST_CASE("acceleration loss is translation invariant and its gradient is exact") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<Vec3>> seq(6);
    for (auto& f : seq) f = random_cloud(rng, 5);
    const Vec3 offset = random_vec(rng, 10.0);
    auto shifted = seq;
    for (auto& f : shifted)
      for (auto& p : f) p += offset;
    const auto base = acceleration_loss(std::span<const std::vector<Vec3>>(seq));
    CHECK(acceleration_loss(std::span<const std::vector<Vec3>>(shifted)).value ==
          doctest::Approx(base.value).epsilon(1e-9));

    Eigen::VectorXd x(6 * 15), g(6 * 15);
    for (int t = 0; t < 6; ++t) {
      x.segment(t * 15, 15) = flatten(seq[t]);
      g.segment(t * 15, 15) = flatten(base.grad[t]);
    }
    auto f = [&](const Eigen::VectorXd& xp) {
      std::vector<std::vector<Vec3>> s(6);
      for (int t = 0; t < 6; ++t) s[t] = unflatten(xp.segment(t * 15, 15));
      return acceleration_loss(std::span<const std::vector<Vec3>>(s)).value;
    };
    CHECK(relative_error(g, central_difference(f, x)) < 1e-4);
  }
}

TEST_CASE("apply_similarity") {
  const std::vector<Vec3> p{{1, 1, 1}};
  CHECK(apply_similarity(p, SimilarityPose{})[0] == Vec3(1, 1, 1));
  SimilarityPose pose;
  pose.log_scale = std::log(2.0);
  pose.translation = Vec3(1, 0, 0);
  CHECK((apply_similarity(p, pose)[0] - Vec3(3, 2, 2)).norm() < 1e-15);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_cloud(rng, 10);
    SimilarityPose q;
    q.rotation = random_rotation(rng);
    q.translation = random_vec(rng, 2.0);
    q.log_scale = random_vec(rng, 0.5)[0];
    const auto back = apply_similarity(apply_similarity(pts, q), q.inverse());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK((back[i] - pts[i]).norm() < 1e-9);
  }
}

TEST_CASE("apply_similarity gradients through the 6D parametrisation") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_cloud(rng, 6);
    std::vector<Vec3> w(pts.size());
    for (auto& v : w) v = random_vec(rng);
    Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = n(rng);
    const Vec3 t = random_vec(rng);
    const double ls = 0.3 * n(rng);

    // x = [points (18), r6d (6), t (3), log_scale (1)]
    Eigen::VectorXd x(28);
    x << flatten(pts), r, t, ls;
    auto f = [&](const Eigen::VectorXd& xp) {
      SimilarityPose pose;
      pose.rotation = rot6d_to_matrix(Rot6D(xp.segment<6>(18)));
      pose.translation = xp.segment<3>(24);
      pose.log_scale = xp[27];
      const auto out = apply_similarity(unflatten(xp.head(18)), pose);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) acc += out[i].dot(w[i]);
      return acc;
    };
    SimilarityPose pose;
    pose.rotation = rot6d_to_matrix(r);
    pose.translation = t;
    pose.log_scale = ls;
    const auto g = apply_similarity_backward(pts, pose, w);
    Eigen::VectorXd analytic(28);
    analytic << flatten(g.points), rot6d_to_matrix_backward(r, g.rotation), g.translation, g.log_scale;
    CHECK(relative_error(analytic, central_difference(f, x)) < 1e-4);
  }
}

TEST_CASE("project_points") {
  Camera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 64.0;
  const std::vector<Vec3> pts{{0, 0, 1}, {0.5, 0, 1}};
  const auto proj = project_points(pts, cam);
  CHECK(proj[0].pixel.isApprox(Vec2(64, 64)));
  CHECK(proj[1].pixel.isApprox(Vec2(114, 64)));
  CHECK(proj[1].depth == 1.0);

  const std::vector<Vec3> bad{{0, 0, 1}, {0, 0, -1}, {1, 1, 0}};
  try {
    project_points(bad, cam);
    FAIL("expected BehindCamera");
  } catch (const BehindCameraError& e) {
    CHECK(e.indices() == std::vector<std::size_t>{1, 2});
  }

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 p = random_vec(rng) + Vec3(0, 0, 3);
    for (int row = 0; row < 2; ++row) {
      auto f = [&](const Eigen::VectorXd& x) { return project_points(std::vector<Vec3>{Vec3(x)}, cam)[0].pixel[row]; };
      const Eigen::VectorXd analytic = projection_jacobian(p, cam).row(row).transpose();
      CHECK(relative_error(analytic, central_difference(f, Eigen::VectorXd(p))) < 1e-4);
    }
  }
}

TEST_CASE("soft rasterisation kernel shape and empty input") {
  Camera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 32.0;
  cam.width = cam.height = 64;
  const auto empty = rasterize_soft_mask(std::vector<Vec3>{}, cam, 2.0);
  CHECK(std::all_of(empty.values.begin(), empty.values.end(), [](double v) { return v == 0.0; }));

  const auto mask = rasterize_soft_mask(std::vector<Vec3>{{0, 0, 1}}, cam, 2.0);
  CHECK(mask.at(32, 32) == 1.0);
  for (int d = 1; d <= 4; ++d) CHECK(mask.at(32 + d, 32) < mask.at(32 + d - 1, 32));
  CHECK(mask.at(40, 32) == 0.0);
  for (double v : mask.values) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("soft rasterisation equals per-pixel oracle and gradients match finite differences") {
  const Camera cam = small_camera();
  const double radius = 2.0;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> wdist(-1.0, 1.0);
  int tested = 0;
  while (tested < 100) {
    const auto pts = random_cloud(rng, 8, 0.35, Vec3(0, 0, 1.0));
    const auto mask = rasterize_soft_mask(pts, cam, radius);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) CHECK(std::abs(mask.at(x, y) - oracle_pixel(pts, cam, radius, x, y)) < 1e-10);

    SoftMask weight(cam.width, cam.height);
    for (auto& v : weight.values) v = wdist(rng);
    const auto base = support_pattern(pts, cam, radius);
    bool stable = true;
    auto f = [&](const Eigen::VectorXd& x) {
      const auto p = unflatten(x);
      if (support_pattern(p, cam, radius) != base) stable = false;
      const auto m = rasterize_soft_mask(p, cam, radius);
      double acc = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) acc += m.values[i] * weight.values[i];
      return acc;
    };
    const Eigen::VectorXd numeric = central_difference(f, flatten(pts));
    if (!stable) continue;  // a pixel crossed the truncation radius inside the stencil
    const auto grad = rasterize_soft_mask_backward(pts, cam, radius, weight);
    CHECK(relative_error(flatten(grad), numeric) < 1e-4);
    ++tested;
  }
}

TEST_CASE("rasterisation gradient with an exactly opaque splat") {
  const Camera cam = small_camera();
  // The first point lands exactly on pixel (8, 8); no pixel sits on the truncation boundary.
  const double kRadius = 1.9;
  std::vector<Vec3> pts{{0.5 / 20.0, 0.5 / 20.0, 1.0}, {0.6 / 20.0, 0.2 / 20.0, 1.0}};
  const auto m = rasterize_soft_mask(pts, cam, kRadius);
  CHECK(m.at(8, 8) == 1.0);
  SoftMask w(cam.width, cam.height, 1.0);
  const auto g = rasterize_soft_mask_backward(pts, cam, kRadius, w);
  auto f = [&](const Eigen::VectorXd& x) {
    const auto mm = rasterize_soft_mask(unflatten(x), cam, kRadius);
    double s = 0.0;
    for (double v : mm.values) s += v;
    return s;
  };
  CHECK(relative_error(flatten(g), central_difference(f, flatten(pts))) < 1e-4);
}
