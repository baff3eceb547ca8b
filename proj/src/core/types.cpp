#include "mocap/core/types.hpp"

#include "mocap/core/error.hpp"

#include <cmath>
#include <string>

namespace mocap {

namespace {

bool finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

} // namespace

void validate(const Detection& det) {
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
        throw RejectedInput("detection confidence " + std::to_string(det.confidence) + " outside [0,1]");
    }
    if (!finite(det.translation) || !(det.translation.z() > 0.0)) {
        throw RejectedInput("detection translation must be finite with z > 0");
    }
    if (!std::isfinite(det.timestamp)) {
        throw RejectedInput("detection timestamp is not finite");
    }
    if (!finite(det.global_orient)) {
        throw RejectedInput("detection global_orient is not finite");
    }
    for (const auto& r : det.body_pose) {
        if (!finite(r)) {
            throw RejectedInput("detection body_pose is not finite");
        }
    }
}

MotionFrame MotionFrame::from_detection(TrackId person_id, const Detection& det) {
    MotionFrame f;
    f.person_id = person_id;
    f.camera_id = det.camera_id;
    f.timestamp = det.timestamp;
    f.global_orient = det.global_orient;
    f.body_pose = det.body_pose;
    f.translation = det.translation;
    return f;
}

} // namespace mocap
