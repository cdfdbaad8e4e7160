// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "intertrack/types.hpp"

namespace intertrack {

Mat3 skew(const Vec3& v);

/// Gram-Schmidt decoding of the 6D representation. Throws DegenerateInput
/// when either vector (or the orthogonalised second one) has norm < 1e-9.
Mat3 rot6d_to_matrix(const Rot6D& r);

/// Vector-Jacobian product of rot6d_to_matrix: maps dL/dR to dL/dr.
Rot6D rot6d_to_matrix_backward(const Rot6D& r, const Mat3& grad_rotation);

/// Throws InvalidRotation when R is not orthonormal within 1e-4.
Rot6D matrix_to_rot6d(const Mat3& R);

bool is_rotation(const Mat3& R, double tol = 1e-6);

/// Rodrigues' formula; first-order Taylor expansion below angle 1e-8.
Mat3 axis_angle_to_matrix(const Vec3& axis_angle);

/// dL/d(axis_angle) given dL/dR.
Vec3 axis_angle_to_matrix_backward(const Vec3& axis_angle, const Mat3& grad_rotation);

Vec3 matrix_to_axis_angle(const Mat3& R);

/// Geodesic angle (radians) of Aᵀ B.
double geodesic_angle(const Mat3& A, const Mat3& B);

/// Closest rotation in Frobenius norm (polar projection with determinant
/// correction). Throws DegenerateMean when M has rank below 2.
Mat3 nearest_rotation(const Mat3& M);

}  // namespace intertrack
