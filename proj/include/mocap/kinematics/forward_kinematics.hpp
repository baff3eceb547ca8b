#pragma once

#include "mocap/core/types.hpp"
#include "mocap/kinematics/rotation.hpp"
#include "mocap/kinematics/skeleton.hpp"

#include <array>
#include <span>
#include <vector>

namespace mocap::kinematics {

/// World-space joints of one person.
struct SkeletonPose {
    TrackId person_id = 0;
    std::array<Vec3, kJointCount> joint_positions;
    std::array<Mat3, kJointCount> joint_rotations;
};

/// FK over an arbitrary tree (parent[i] < i, parent[0] = -1). `local_rotations`
/// holds one axis-angle per joint, joint 0 being the global orientation.
void forward_kinematics_tree(std::span<const int> parent, std::span<const Vec3> rest_offsets,
                             std::span<const Vec3> local_rotations, const Vec3& root_translation,
                             std::span<Vec3> world_positions, std::span<Mat3> world_rotations);

SkeletonPose forward_kinematics(const Skeleton& skel, const MotionFrame& frame);

} // namespace mocap::kinematics
