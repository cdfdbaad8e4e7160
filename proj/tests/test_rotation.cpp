// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "intertrack/error.hpp"
#include "intertrack/rotation.hpp"
#include "oracles.hpp"

using namespace intertrack;
using namespace intertrack::testing;

TEST_CASE("rot6d decodes canonical inputs") {
  Rot6D r;
  r << 1, 0, 0, 0, 1, 0;
  CHECK(rot6d_to_matrix(r).isApprox(Mat3::Identity(), 1e-15));
  r << 2, 0, 0, 0, 3, 0;
  CHECK(rot6d_to_matrix(r).isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("rot6d rejects degenerate vectors") {
  Rot6D parallel;
  parallel << 1, 0, 0, 2, 0, 0;
  CHECK_THROWS_AS(rot6d_to_matrix(parallel), Error);
  Rot6D zero = Rot6D::Zero();
  zero[4] = 1.0;
  try {
    rot6d_to_matrix(zero);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }
}

TEST_CASE("matrix_to_rot6d takes the first two columns") {
  Rot6D expect;
  expect << 1, 0, 0, 0, 1, 0;
  CHECK(matrix_to_rot6d(Mat3::Identity()).isApprox(expect));
  expect << 0, 1, 0, -1, 0, 0;
  CHECK((matrix_to_rot6d(rot_z(M_PI / 2)) - expect).norm() < 1e-15);
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.01;
  CHECK_THROWS_AS(matrix_to_rot6d(bad), Error);
}

TEST_CASE("rot6d round trip over random rotations") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 R = random_rotation(rng);
    CHECK((rot6d_to_matrix(matrix_to_rot6d(R)) - R).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rot6d output is always a rotation") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = n(rng);
    const Mat3 R = rot6d_to_matrix(r);
    CHECK(is_rotation(R, 1e-6));
    CHECK((R.col(0) - r.head<3>().normalized()).norm() < 1e-12);
  }
}

TEST_CASE("rot6d backward matches finite differences") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = n(rng);
    Mat3 W;
    for (int k = 0; k < 9; ++k) W(k) = n(rng);
    auto f = [&](const Eigen::VectorXd& x) { return rot6d_to_matrix(Rot6D(x)).cwiseProduct(W).sum(); };
    const Eigen::VectorXd numeric = central_difference(f, Eigen::VectorXd(r));
    const Eigen::VectorXd analytic = rot6d_to_matrix_backward(r, W);
    CHECK(relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("axis-angle matches Eigen and its backward matches finite differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 w = random_vec(rng, 2.0);
    const Mat3 ref = Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix();
    CHECK((axis_angle_to_matrix(w) - ref).cwiseAbs().maxCoeff() < 1e-12);
    if (w.norm() < M_PI) CHECK((matrix_to_axis_angle(ref) - w).norm() < 1e-9 * std::max(1.0, w.norm()));
    Mat3 W;
    for (int k = 0; k < 9; ++k) W(k) = n(rng);
    auto f = [&](const Eigen::VectorXd& x) { return axis_angle_to_matrix(Vec3(x)).cwiseProduct(W).sum(); };
    CHECK(relative_error(axis_angle_to_matrix_backward(w, W), central_difference(f, Eigen::VectorXd(w))) < 1e-4);
  }
  // Near the origin the Taylor branch is used.
  Mat3 W = Mat3::Random();
  const Vec3 tiny(1e-10, -2e-10, 3e-10);
  auto f = [&](const Eigen::VectorXd& x) { return axis_angle_to_matrix(Vec3(x)).cwiseProduct(W).sum(); };
  CHECK(relative_error(axis_angle_to_matrix_backward(tiny, W), central_difference(f, Eigen::VectorXd(tiny), 1e-9)) <
        1e-4);
}

TEST_CASE("geodesic angle and nearest rotation") {
  CHECK(geodesic_angle(Mat3::Identity(), rot_z(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(geodesic_angle(Mat3::Identity(), rot_z(M_PI / 2)) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(geodesic_angle(rot_z(0.1), rot_z(0.1)) < 1e-7);

  std::mt19937_64 rng(9);
  const Mat3 R = random_rotation(rng);
  CHECK((nearest_rotation(2.5 * R) - R).norm() < 1e-12);
  Mat3 reflect = R;
  reflect.col(2) *= -1.0;
  const Mat3 fixed = nearest_rotation(reflect);
  CHECK(fixed.determinant() == doctest::Approx(1.0));
  CHECK_THROWS_AS(nearest_rotation(Mat3::Zero()), Error);
}
