#pragma once

#include "mocap/core/types.hpp"

namespace mocap {

/// Pinhole intrinsics of the (virtual) webcam that produced the detections.
struct CameraIntrinsics {
    double focal_px = 548.0;
    double cx = 256.0;
    double cy = 256.0;
    double width = 512.0;
    double height = 512.0;

    /// Throws ConfigError if focal/size are non-positive or the principal point
    /// lies outside the image.
    void validate() const;

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Image-space observation of a person: projected root position, depth and
/// inverse depth. The scale term is always derived from depth.
class ObsUVZS {
public:
    ObsUVZS(double u, double v, double z);

    double u() const { return u_; }
    double v() const { return v_; }
    double z() const { return z_; }
    double s() const { return 1.0 / z_; }

private:
    double u_;
    double v_;
    double z_;
};

/// Pinhole projection of a camera-space translation. Throws RejectedInput if z <= 0.
ObsUVZS project_translation(const Vec3& t, const CameraIntrinsics& k);

/// Exact inverse of project_translation.
Vec3 unproject_obs(const ObsUVZS& o, const CameraIntrinsics& k);

} // namespace mocap
