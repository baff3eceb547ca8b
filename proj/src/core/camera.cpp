#include "mocap/core/camera.hpp"

#include "mocap/core/error.hpp"

#include <cmath>

namespace mocap {

void CameraIntrinsics::validate() const {
    if (!(focal_px > 0.0)) {
        throw ConfigError("camera.focal_px must be > 0");
    }
    if (!(width > 0.0) || !(height > 0.0)) {
        throw ConfigError("camera.width and camera.height must be > 0");
    }
    if (!(cx >= 0.0 && cx <= width)) {
        throw ConfigError("camera.cx must lie in [0, width]");
    }
    if (!(cy >= 0.0 && cy <= height)) {
        throw ConfigError("camera.cy must lie in [0, height]");
    }
}

ObsUVZS::ObsUVZS(double u, double v, double z) : u_(u), v_(v), z_(z) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw RejectedInput("observation depth must be finite and > 0");
    }
}

ObsUVZS project_translation(const Vec3& t, const CameraIntrinsics& k) {
    const double z = t.z();
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw RejectedInput("translation z must be > 0 to project");
    }
    return ObsUVZS(k.focal_px * t.x() / z + k.cx, k.focal_px * t.y() / z + k.cy, z);
}

Vec3 unproject_obs(const ObsUVZS& o, const CameraIntrinsics& k) {
    const double z = o.z();
    return Vec3((o.u() - k.cx) * z / k.focal_px, (o.v() - k.cy) * z / k.focal_px, z);
}

} // namespace mocap
