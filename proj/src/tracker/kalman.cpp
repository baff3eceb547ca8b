#include "mocap/tracker/kalman.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace mocap::tracking {

Eigen::Matrix<double, 6, 1> ConstantVelocityFilter::unit_scale() const {
    Eigen::Matrix<double, 6, 1> sc;
    sc << p_.width, p_.height, 1.0, p_.width, p_.height, 1.0;
    return sc;
}

KalmanState ConstantVelocityFilter::initiate(const ObsVec& obs) const {
    KalmanState x;
    x.mean << obs, 0.0, 0.0, 0.0;
    x.mean(2) = std::max(x.mean(2), p_.s_min);
    const auto sc = unit_scale();
    Eigen::Matrix<double, 6, 1> std_dev;
    std_dev << p_.obs_noise, p_.obs_noise, p_.obs_noise, p_.init_velocity_std, p_.init_velocity_std,
        p_.init_velocity_std;
    x.cov = (std_dev.cwiseProduct(sc)).array().square().matrix().asDiagonal();
    return x;
}

KalmanState ConstantVelocityFilter::predict(const KalmanState& x, double dt) const {
    StateCov f = StateCov::Identity();
    f(0, 3) = dt;
    f(1, 4) = dt;
    f(2, 5) = dt;
    const auto sc = unit_scale();
    const StateCov q = (p_.process_noise * dt * sc.array().square()).matrix().asDiagonal();

    KalmanState out;
    out.mean = f * x.mean;
    out.mean(2) = std::max(out.mean(2), p_.s_min);
    out.cov = f * x.cov * f.transpose() + q;
    return out;
}

KalmanState ConstantVelocityFilter::update(const KalmanState& x, const ObsVec& obs) const {
    Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    h(2, 2) = 1.0;
    Eigen::Vector3d r_diag(p_.obs_noise * p_.width, p_.obs_noise * p_.height, p_.obs_noise);
    const Eigen::Matrix3d r = r_diag.array().square().matrix().asDiagonal();

    const Eigen::Matrix3d s = h * x.cov * h.transpose() + r;
    const Eigen::Matrix<double, 6, 3> pht = x.cov * h.transpose();
    const Eigen::Matrix<double, 6, 3> gain = s.llt().solve(pht.transpose()).transpose();

    KalmanState out;
    out.mean = x.mean + gain * (obs - h * x.mean);
    out.mean(2) = std::max(out.mean(2), p_.s_min);
    const StateCov ikh = StateCov::Identity() - gain * h;
    // Joseph form
    out.cov = ikh * x.cov * ikh.transpose() + gain * r * gain.transpose();
    return out;
}

} // namespace mocap::tracking
