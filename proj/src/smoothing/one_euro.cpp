#include "mocap/smoothing/one_euro.hpp"

#include "mocap/core/error.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mocap::smoothing {

void OneEuroParams::validate() const {
    if (!(min_cutoff > 0.0)) throw ConfigError("min_cutoff must be > 0");
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (!(d_cutoff > 0.0)) throw ConfigError("d_cutoff must be > 0");
}

double smoothing_factor(double cutoff, double dt) {
    if (!(cutoff > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("smoothing_factor requires cutoff > 0 and dt > 0");
    }
    const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff);
    return 1.0 / (1.0 + tau / dt);
}

namespace {

// prev + a*(x - prev): same value as a*x + (1-a)*prev, but exact when x == prev.
double lowpass(double x, double prev, double a) { return prev + a * (x - prev); }

} // namespace

std::pair<OneEuroState, double> one_euro_step(const OneEuroState& state, const OneEuroParams& params, double x,
                                              double t) {
    OneEuroState next;
    next.last_t = t;
    next.initialized = true;
    if (!state.initialized) {
        next.x_hat = x;
        next.dx_hat = 0.0;
        return {next, x};
    }
    if (!(t > state.last_t)) {
        throw RejectedInput("one-euro sample time does not increase");
    }
    const double dt = t - state.last_t;
    const double dx = (x - state.x_hat) / dt;
    next.dx_hat = lowpass(dx, state.dx_hat, smoothing_factor(params.d_cutoff, dt));
    const double cutoff = params.min_cutoff + params.beta * std::abs(next.dx_hat);
    next.x_hat = lowpass(x, state.x_hat, smoothing_factor(cutoff, dt));
    return {next, next.x_hat};
}

} // namespace mocap::smoothing
