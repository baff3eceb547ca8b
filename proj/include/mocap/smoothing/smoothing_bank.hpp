#pragma once

#include "mocap/core/types.hpp"
#include "mocap/smoothing/one_euro.hpp"

#include <array>
#include <cstddef>
#include <optional>

namespace mocap::smoothing {

/// Parameters for the three channel groups of a bank.
struct SmoothingParams {
    OneEuroParams orient{1.0, 0.3, 1.0};
    OneEuroParams pose{1.0, 0.3, 1.0};
    OneEuroParams trans{0.5, 0.5, 1.0};

    void validate() const;

    friend bool operator==(const SmoothingParams&, const SmoothingParams&) = default;
};

/// Picks whichever of r and its 2*pi-complement r*(1 - 2*pi/|r|) lies closer
/// to `prev`. Both encode the same rotation.
Vec3 continuity_adjust(const Vec3& r, const Vec3& prev);

/// 75 independent scalar 1-euro filters for one tracked person: 3 global
/// orientation channels, 69 body pose channels, 3 translation channels.
class SmoothingBank {
public:
    explicit SmoothingBank(SmoothingParams params = {});

    /// Filters one sample taken at time t. Returns nullopt (bank unchanged,
    /// drop counted) if t does not exceed the previous sample's time.
    std::optional<MotionFrame> smooth(const MotionFrame& raw, double t);

    std::size_t dropped() const { return dropped_; }
    std::optional<double> last_timestamp() const { return last_t_; }
    const SmoothingParams& params() const { return params_; }

private:
    Vec3 filter_rotation(std::array<OneEuroState, 3>& states, const OneEuroParams& p, const Vec3& r, double t);
    Vec3 filter_vec(std::array<OneEuroState, 3>& states, const OneEuroParams& p, const Vec3& x, double t);

    SmoothingParams params_;
    std::array<OneEuroState, 3> orient_{};
    std::array<std::array<OneEuroState, 3>, kBodyJointCount> pose_{};
    std::array<OneEuroState, 3> trans_{};
    std::optional<double> last_t_;
    std::size_t dropped_ = 0;
};

} // namespace mocap::smoothing
