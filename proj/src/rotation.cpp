// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/rotation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "intertrack/error.hpp"

namespace intertrack {

namespace {
constexpr double kDegenerateNorm = 1e-9;
constexpr double kSmallAngle = 1e-8;
}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return s;
}

Mat3 rot6d_to_matrix(const Rot6D& r) {
  const Vec3 a1 = r.head<3>();
  const Vec3 a2 = r.tail<3>();
  const double n1 = a1.norm();
  if (n1 < kDegenerateNorm) throw Error(ErrorCode::DegenerateInput, "first 6D vector is near zero");
  const Vec3 b1 = a1 / n1;
  const Vec3 u2 = a2 - b1.dot(a2) * b1;
  const double n2 = u2.norm();
  if (n2 < kDegenerateNorm) throw Error(ErrorCode::DegenerateInput, "6D vectors are parallel or second is near zero");
  const Vec3 b2 = u2 / n2;
  Mat3 R;
  R.col(0) = b1;
  R.col(1) = b2;
  R.col(2) = b1.cross(b2);
  return R;
}

Rot6D rot6d_to_matrix_backward(const Rot6D& r, const Mat3& g) {
  const Vec3 a1 = r.head<3>();
  const Vec3 a2 = r.tail<3>();
  const double n1 = a1.norm();
  const Vec3 b1 = a1 / n1;
  const Vec3 u2 = a2 - b1.dot(a2) * b1;
  const double n2 = u2.norm();
  const Vec3 b2 = u2 / n2;

  // b3 = b1 x b2
  Vec3 gb1 = g.col(0) + b2.cross(g.col(2));
  const Vec3 gb2 = g.col(1) + g.col(2).cross(b1);

  const Vec3 gu2 = (gb2 - b2 * b2.dot(gb2)) / n2;
  const Vec3 ga2 = gu2 - b1 * b1.dot(gu2);
  gb1 -= b1.dot(a2) * gu2 + b1.dot(gu2) * a2;
  const Vec3 ga1 = (gb1 - b1 * b1.dot(gb1)) / n1;

  Rot6D out;
  out.head<3>() = ga1;
  out.tail<3>() = ga2;
  return out;
}

bool is_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

Rot6D matrix_to_rot6d(const Mat3& R) {
  if (!is_rotation(R, 1e-4)) throw Error(ErrorCode::InvalidRotation, "matrix is not a rotation within 1e-4");
  Rot6D r;
  r.head<3>() = R.col(0);
  r.tail<3>() = R.col(1);
  return r;
}

Mat3 axis_angle_to_matrix(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 K = skew(w);
  if (theta < kSmallAngle) return Mat3::Identity() + K;
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + s * K + c * K * K;
}

Vec3 axis_angle_to_matrix_backward(const Vec3& w, const Mat3& g) {
  const double theta2 = w.squaredNorm();
  Vec3 out;
  if (std::sqrt(theta2) < kSmallAngle) {
    // dR/dw_i at the origin is [e_i]x.
    for (int i = 0; i < 3; ++i) out[i] = g.cwiseProduct(skew(Vec3::Unit(i))).sum();
    return out;
  }
  // dR/dw_i = (w_i [w]x + [w x (I - R) e_i]x) R / |w|^2
  const Mat3 R = axis_angle_to_matrix(w);
  const Mat3 K = skew(w);
  const Mat3 IminusR = Mat3::Identity() - R;
  for (int i = 0; i < 3; ++i) {
    const Mat3 dR = (w[i] * K + skew(w.cross(IminusR.col(i)))) * R / theta2;
    out[i] = g.cwiseProduct(dR).sum();
  }
  return out;
}

Vec3 matrix_to_axis_angle(const Mat3& R) {
  const double cos_angle = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  const Vec3 v(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (angle < 1e-6) return 0.5 * v;
  if (M_PI - angle < 1e-6) {
    // Axis from the symmetric part, R = 2 n nᵀ - I.
    const Mat3 B = 0.5 * (R + Mat3::Identity());
    int k = 0;
    B.diagonal().maxCoeff(&k);
    Vec3 n = B.col(k) / std::sqrt(std::max(B(k, k), 1e-300));
    n.normalize();
    return angle * n;
  }
  return angle / (2.0 * std::sin(angle)) * v;
}

double geodesic_angle(const Mat3& A, const Mat3& B) {
  const double c = std::clamp(((A.transpose() * B).trace() - 1.0) * 0.5, -1.0, 1.0);
  // acos loses precision near zero; use the antisymmetric part there.
  if (c > 0.99) {
    const Mat3 D = A.transpose() * B;
    const Vec3 v(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
    return std::asin(std::clamp(0.5 * v.norm(), 0.0, 1.0));
  }
  return std::acos(c);
}

Mat3 nearest_rotation(const Mat3& M) {
  if (!M.allFinite()) throw Error(ErrorCode::DegenerateMean, "non-finite mean matrix");
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[1] < 1e-9 * sv[0]) {
    throw Error(ErrorCode::DegenerateMean, "mean matrix is rank deficient");
  }
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Mat3 D = Mat3::Identity();
  D(2, 2) = (U * V.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return U * D * V.transpose();
}

}  // namespace intertrack
