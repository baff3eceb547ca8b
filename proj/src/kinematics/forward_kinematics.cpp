#include "mocap/kinematics/forward_kinematics.hpp"

#include <cassert>

namespace mocap::kinematics {

void forward_kinematics_tree(std::span<const int> parent, std::span<const Vec3> rest_offsets,
                             std::span<const Vec3> local_rotations, const Vec3& root_translation,
                             std::span<Vec3> world_positions, std::span<Mat3> world_rotations) {
    const std::size_t n = parent.size();
    assert(rest_offsets.size() == n && local_rotations.size() == n);
    assert(world_positions.size() == n && world_rotations.size() == n);
    if (n == 0) return;

    world_rotations[0] = axis_angle_to_matrix(local_rotations[0]);
    world_positions[0] = root_translation;
    for (std::size_t i = 1; i < n; ++i) {
        const auto p = static_cast<std::size_t>(parent[i]);
        world_rotations[i] = world_rotations[p] * axis_angle_to_matrix(local_rotations[i]);
        world_positions[i] = world_positions[p] + world_rotations[p] * rest_offsets[i];
    }
}

SkeletonPose forward_kinematics(const Skeleton& skel, const MotionFrame& frame) {
    std::array<Vec3, kJointCount> local;
    local[0] = frame.global_orient;
    for (std::size_t j = 0; j < kBodyJointCount; ++j) {
        local[j + 1] = frame.body_pose[j];
    }
    SkeletonPose pose;
    pose.person_id = frame.person_id;
    forward_kinematics_tree(skel.parent, skel.rest_offsets, local, frame.translation, pose.joint_positions,
                            pose.joint_rotations);
    return pose;
}

} // namespace mocap::kinematics
