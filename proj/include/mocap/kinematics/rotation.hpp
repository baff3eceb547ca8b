#pragma once

#include "mocap/core/types.hpp"

#include <Eigen/Core>

namespace mocap::kinematics {

using Mat3 = Eigen::Matrix3d;

Mat3 skew(const Vec3& v);

/// Rodrigues' formula; second-order Taylor expansion below 1e-8 rad.
Mat3 axis_angle_to_matrix(const Vec3& r);

/// Inverse of axis_angle_to_matrix with the angle in [0, pi].
Vec3 matrix_to_axis_angle(const Mat3& m);

} // namespace mocap::kinematics
