#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mocap {

using Vec3 = Eigen::Vector3d;

inline constexpr std::size_t kJointCount = 24;
inline constexpr std::size_t kBodyJointCount = 23;
inline constexpr std::size_t kPoseChannelCount = 3 * kBodyJointCount;  // 69
inline constexpr std::size_t kMotionChannelCount = 3 + kPoseChannelCount + 3;  // 75

/// Axis-angle rotations for SMPL joints 1..23 (joint 0 is the global orientation).
using BodyPose = std::array<Vec3, kBodyJointCount>;

using TrackId = std::int64_t;

/// One person candidate in one camera frame, as produced by the upstream
/// monocular estimator: SMPL pose in axis-angle plus camera-space translation.
struct Detection {
    std::string camera_id;
    std::int64_t frame_index = 0;
    double timestamp = 0.0;  // seconds since session start, monotone per camera
    double confidence = 0.0;
    Vec3 global_orient = Vec3::Zero();
    BodyPose body_pose = zero_pose();
    Vec3 translation = Vec3(0.0, 0.0, 1.0);  // meters, camera space, z > 0

    static BodyPose zero_pose() {
        BodyPose pose;
        pose.fill(Vec3::Zero());
        return pose;
    }

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Throws RejectedInput when the detection breaks the data-model invariants
/// (z <= 0, confidence outside [0,1], non-finite values).
void validate(const Detection& det);

/// All detections a camera reported for one frame.
struct DetectionFrame {
    std::string camera_id;
    std::int64_t frame_index = 0;
    double timestamp = 0.0;
    std::vector<Detection> detections;

    friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// Smoothed, identity-stamped per-person motion sample.
struct MotionFrame {
    TrackId person_id = 0;
    std::string camera_id;
    double timestamp = 0.0;
    Vec3 global_orient = Vec3::Zero();
    BodyPose body_pose = Detection::zero_pose();
    Vec3 translation = Vec3::Zero();

    static MotionFrame from_detection(TrackId person_id, const Detection& det);

    friend bool operator==(const MotionFrame&, const MotionFrame&) = default;
};

} // namespace mocap
