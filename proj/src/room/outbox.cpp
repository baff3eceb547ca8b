#include "mocap/room/outbox.hpp"

#include <stdexcept>

namespace mocap::room {

Outbox::Outbox(std::size_t batch_capacity) : capacity_(batch_capacity) {
    if (batch_capacity == 0) {
        throw std::invalid_argument("outbox capacity must be positive");
    }
}

bool Outbox::push_batch(Payload p) {
    bool dropped = false;
    {
        std::lock_guard lock(mu_);
        if (closed_) {
            return false;
        }
        if (batches_ == capacity_) {
            for (auto it = items_.begin(); it != items_.end(); ++it) {
                if (it->batch) {
                    items_.erase(it);
                    --batches_;
                    ++dropped_;
                    dropped = true;
                    break;
                }
            }
        }
        items_.push_back({std::move(p), true});
        ++batches_;
    }
    cv_.notify_one();
    return dropped;
}

void Outbox::push_control(Payload p) {
    {
        std::lock_guard lock(mu_);
        if (closed_) {
            return;
        }
        items_.push_back({std::move(p), false});
    }
    cv_.notify_one();
}

std::optional<Payload> Outbox::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) {
        return std::nullopt;
    }
    Item item = std::move(items_.front());
    items_.pop_front();
    if (item.batch) {
        --batches_;
    }
    return std::move(item.payload);
}

void Outbox::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool Outbox::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

std::size_t Outbox::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

std::size_t Outbox::batches_queued() const {
    std::lock_guard lock(mu_);
    return batches_;
}

std::size_t Outbox::dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
}

} // namespace mocap::room
