#include "mocap/room/rtt.hpp"

namespace mocap::room {

double RttEstimator::add_sample(double ms) {
    estimate_ = estimate_ ? *estimate_ + kSmoothing * (ms - *estimate_) : ms;
    return *estimate_;
}

std::int64_t RttEstimator::ping_sent(Clock::time_point now) {
    // An unanswered ping keeps its original send time so a silent peer still times out.
    if (outstanding_) {
        return outstanding_->first;
    }
    outstanding_ = {next_seq_++, now};
    return outstanding_->first;
}

std::optional<double> RttEstimator::pong_received(std::int64_t seq, Clock::time_point now) {
    if (!outstanding_ || outstanding_->first != seq) {
        return std::nullopt;
    }
    const double ms = std::chrono::duration<double, std::milli>(now - outstanding_->second).count();
    outstanding_.reset();
    healthy_ = true;
    add_sample(ms);
    return ms;
}

bool RttEstimator::check(Clock::time_point now) {
    if (outstanding_ && now - outstanding_->second > kTimeout) {
        healthy_ = false;
    }
    return healthy_;
}

} // namespace mocap::room
