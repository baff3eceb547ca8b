#pragma once

#include <utility>

namespace mocap::smoothing {

struct OneEuroParams {
    double min_cutoff = 1.0;  // Hz
    double beta = 0.0;
    double d_cutoff = 1.0;    // Hz

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const OneEuroParams&, const OneEuroParams&) = default;
};

struct OneEuroState {
    double x_hat = 0.0;
    double dx_hat = 0.0;
    double last_t = 0.0;
    bool initialized = false;
};

/// alpha = 1 / (1 + tau/dt), tau = 1 / (2*pi*cutoff). Throws std::invalid_argument
/// unless cutoff > 0 and dt > 0.
double smoothing_factor(double cutoff, double dt);

/// One step of the 1-euro recurrence. The first sample passes through with a
/// zero derivative. Throws RejectedInput if t <= last_t on an initialized state.
std::pair<OneEuroState, double> one_euro_step(const OneEuroState& state, const OneEuroParams& params, double x,
                                              double t);

} // namespace mocap::smoothing
