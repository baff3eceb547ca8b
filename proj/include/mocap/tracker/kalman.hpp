#pragma once

#include <Eigen/Core>

namespace mocap::tracking {

using StateVec = Eigen::Matrix<double, 6, 1>;  // (u, v, s, du, dv, ds)
using StateCov = Eigen::Matrix<double, 6, 6>;
using ObsVec = Eigen::Vector3d;                // (u, v, s)

struct KalmanState {
    StateVec mean = StateVec::Zero();
    StateCov cov = StateCov::Identity();
};

/// Constant-velocity linear-Gaussian filter over (u, v, s). Noise is
/// expressed in image-normalized units (u/W, v/H, s) and grows linearly in dt.
class ConstantVelocityFilter {
public:
    struct Params {
        double width = 512.0;
        double height = 512.0;
        double process_noise = 0.05;   // normalized variance per second
        double obs_noise = 0.01;       // normalized standard deviation
        double init_velocity_std = 1.0;  // normalized units per second
        double s_min = 0.01;
    };

    explicit ConstantVelocityFilter(Params p) : p_(p) {}

    KalmanState initiate(const ObsVec& obs) const;
    KalmanState predict(const KalmanState& x, double dt) const;
    KalmanState update(const KalmanState& x, const ObsVec& obs) const;

    const Params& params() const { return p_; }

private:
    Eigen::Matrix<double, 6, 1> unit_scale() const;

    Params p_;
};

} // namespace mocap::tracking
