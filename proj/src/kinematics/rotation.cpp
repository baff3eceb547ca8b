#include "mocap/kinematics/rotation.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace mocap::kinematics {

Mat3 skew(const Vec3& v) {
    Mat3 k;
    k << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return k;
}

Mat3 axis_angle_to_matrix(const Vec3& r) {
    const double theta = r.norm();
    if (theta < 1e-8) {
        const Mat3 k = skew(r);
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const Mat3 k = skew(r / theta);
    return Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
}

Vec3 matrix_to_axis_angle(const Mat3& m) {
    const Eigen::AngleAxisd aa(m);
    return aa.axis() * aa.angle();
}

} // namespace mocap::kinematics
