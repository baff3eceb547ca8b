#pragma once

#include "mocap/room/protocol.hpp"
#include "mocap/server/net.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace mocap::server {

/// Headless protocol client used by the synth/replay commands, the bench
/// and the tests. PINGs from the server are answered automatically.
class RoomClient {
public:
    using Clock = std::chrono::steady_clock;

    struct Received {
        room::Message msg;
        std::string payload;  // exact bytes as received, without the length prefix
        Clock::time_point at;
    };
    using Handler = std::function<void(const Received&)>;

    /// Connects immediately. With a handler, every message (except
    /// auto-answered PINGs) goes to it on the reader thread; otherwise
    /// messages are queued for next(). Throws std::system_error.
    RoomClient(const std::string& host, std::uint16_t port, Handler handler = {});
    ~RoomClient();
    RoomClient(const RoomClient&) = delete;
    RoomClient& operator=(const RoomClient&) = delete;

    /// Sends JOIN and waits for the reply. Throws RejectedInput with the
    /// server's reason on JOIN_ERR, std::runtime_error on timeout. Only
    /// usable in queue mode or before a handler consumes JOIN_OK.
    room::JoinOkMsg join(const room::JoinMsg& req, std::chrono::milliseconds timeout = std::chrono::seconds(5));

    /// Thread-safe. Returns false if the connection is gone.
    bool send(const room::Message& msg);
    bool ingest(const DetectionFrame& frame) { return send(room::IngestMsg{frame}); }

    /// Next queued message (queue mode).
    std::optional<Received> next(std::chrono::milliseconds timeout);
    /// Next queued message of type T, discarding others.
    template <typename T>
    std::optional<T> next_of(std::chrono::milliseconds timeout);

    /// Stops reading from the socket, emulating a stalled consumer.
    void pause_reading(bool paused) { paused_ = paused; }
    bool connected() const { return connected_; }
    std::size_t pings_answered() const { return pings_answered_; }
    /// Sends LEAVE (if still connected) and closes the socket.
    void close();

private:
    void read_loop();

    net::Socket sock_;
    Handler handler_;
    std::mutex send_mu_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Received> inbox_;
    std::atomic<bool> connected_{true};
    std::atomic<bool> paused_{false};
    std::atomic<bool> closing_{false};
    std::atomic<std::size_t> pings_answered_{0};
    std::thread reader_;
};

template <typename T>
std::optional<T> RoomClient::next_of(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() < 0) return std::nullopt;
        auto r = next(left);
        if (!r) return std::nullopt;
        if (auto* m = std::get_if<T>(&r->msg)) return *m;
    }
}

} // namespace mocap::server
