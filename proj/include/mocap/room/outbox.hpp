#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace mocap::room {

/// Serialized, framed message shared between all recipients.
using Payload = std::shared_ptr<const std::string>;

/// Bounded per-participant send queue. Frame batches are subject to
/// drop-oldest once `batch_capacity` are queued; control messages (roster,
/// pong, join replies) are never dropped and do not count toward the cap.
/// Push never blocks.
class Outbox {
public:
    explicit Outbox(std::size_t batch_capacity = 8);

    /// Returns true if an older batch was dropped to make room.
    bool push_batch(Payload p);
    void push_control(Payload p);

    /// Blocks up to `timeout` for the next message. nullopt on timeout or
    /// once closed and drained.
    std::optional<Payload> pop(std::chrono::milliseconds timeout);
    void close();

    bool closed() const;
    std::size_t size() const;
    std::size_t batches_queued() const;
    std::size_t dropped() const;

private:
    struct Item {
        Payload payload;
        bool batch;
    };
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Item> items_;
    std::size_t capacity_;
    std::size_t batches_ = 0;
    std::size_t dropped_ = 0;
    bool closed_ = false;
};

} // namespace mocap::room
