#include "mocap/smoothing/smoothing_bank.hpp"

#include "mocap/core/error.hpp"

#include <numbers>
#include <string>

namespace mocap::smoothing {

void SmoothingParams::validate() const {
    const auto check = [](const OneEuroParams& p, const char* group) {
        try {
            p.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("smoothing.") + group + "_" + e.what());
        }
    };
    check(orient, "orient");
    check(pose, "pose");
    check(trans, "trans");
}

Vec3 continuity_adjust(const Vec3& r, const Vec3& prev) {
    const double theta = r.norm();
    if (theta <= 0.0) {
        return r;
    }
    const Vec3 alt = r * (1.0 - 2.0 * std::numbers::pi / theta);
    return (alt - prev).norm() < (r - prev).norm() ? alt : r;
}

SmoothingBank::SmoothingBank(SmoothingParams params) : params_(params) { params_.validate(); }

Vec3 SmoothingBank::filter_vec(std::array<OneEuroState, 3>& states, const OneEuroParams& p, const Vec3& x,
                               double t) {
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        auto [next, value] = one_euro_step(states[c], p, x[c], t);
        states[c] = next;
        out[c] = value;
    }
    return out;
}

Vec3 SmoothingBank::filter_rotation(std::array<OneEuroState, 3>& states, const OneEuroParams& p, const Vec3& r,
                                    double t) {
    Vec3 input = r;
    if (states[0].initialized) {
        input = continuity_adjust(r, Vec3(states[0].x_hat, states[1].x_hat, states[2].x_hat));
    }
    return filter_vec(states, p, input, t);
}

std::optional<MotionFrame> SmoothingBank::smooth(const MotionFrame& raw, double t) {
    if (last_t_ && !(t > *last_t_)) {
        ++dropped_;
        return std::nullopt;
    }
    MotionFrame out = raw;
    out.timestamp = t;
    out.global_orient = filter_rotation(orient_, params_.orient, raw.global_orient, t);
    for (std::size_t j = 0; j < kBodyJointCount; ++j) {
        out.body_pose[j] = filter_rotation(pose_[j], params_.pose, raw.body_pose[j], t);
    }
    out.translation = filter_vec(trans_, params_.trans, raw.translation, t);
    last_t_ = t;
    return out;
}

} // namespace mocap::smoothing
