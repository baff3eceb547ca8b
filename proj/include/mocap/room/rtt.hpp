#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace mocap::room {

/// Ping/pong round-trip tracking for one connection. Not thread-safe.
class RttEstimator {
public:
    using Clock = std::chrono::steady_clock;

    static constexpr double kSmoothing = 0.1;
    static constexpr std::chrono::milliseconds kTimeout{2000};

    RttEstimator() = default;
    explicit RttEstimator(double initial_ms) : estimate_(initial_ms) {}

    /// Folds one sample into the exponential average; the first sample
    /// initializes it.
    double add_sample(double ms);

    /// Returns the sequence number to put in the PING.
    std::int64_t ping_sent(Clock::time_point now);
    /// Matches a PONG to the outstanding ping. Returns the sample in ms, or
    /// nullopt for an unexpected sequence number.
    std::optional<double> pong_received(std::int64_t seq, Clock::time_point now);
    /// Marks the connection unhealthy when the outstanding ping is older than
    /// kTimeout. Returns the health flag.
    bool check(Clock::time_point now);

    std::optional<double> estimate_ms() const { return estimate_; }
    bool healthy() const { return healthy_; }
    bool awaiting_pong() const { return outstanding_.has_value(); }

private:
    std::optional<double> estimate_;
    std::optional<std::pair<std::int64_t, Clock::time_point>> outstanding_;
    std::int64_t next_seq_ = 1;
    bool healthy_ = true;
};

} // namespace mocap::room
