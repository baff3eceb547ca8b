#include "mocap/server/client.hpp"

#include "mocap/core/error.hpp"
#include "mocap/server/log.hpp"

#include <stdexcept>
#include <vector>

namespace mocap::server {

using namespace std::chrono_literals;

RoomClient::RoomClient(const std::string& host, std::uint16_t port, Handler handler)
    : sock_(net::connect_tcp(host, port)), handler_(std::move(handler)) {
    reader_ = std::thread([this] { read_loop(); });
}

RoomClient::~RoomClient() { close(); }

void RoomClient::close() {
    if (closing_.exchange(true)) {
        return;
    }
    if (connected_) {
        send(room::LeaveMsg{});
    }
    sock_.shutdown();
    if (reader_.joinable()) reader_.join();
    sock_.close();
    cv_.notify_all();
}

bool RoomClient::send(const room::Message& msg) {
    const std::string bytes = room::frame_message(room::encode(msg));
    std::lock_guard lock(send_mu_);
    if (!connected_) return false;
    if (!net::send_all(sock_, bytes)) {
        connected_ = false;
        return false;
    }
    return true;
}

room::JoinOkMsg RoomClient::join(const room::JoinMsg& req, std::chrono::milliseconds timeout) {
    if (!send(req)) {
        throw std::runtime_error("connection closed before JOIN");
    }
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        auto r = left.count() > 0 ? next(left) : std::nullopt;
        if (!r) {
            throw std::runtime_error("no reply to JOIN");
        }
        if (auto* ok = std::get_if<room::JoinOkMsg>(&r->msg)) return *ok;
        if (auto* err = std::get_if<room::JoinErrMsg>(&r->msg)) throw RejectedInput(err->reason);
    }
}

std::optional<RoomClient::Received> RoomClient::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || !connected_; });
    if (inbox_.empty()) return std::nullopt;
    Received r = std::move(inbox_.front());
    inbox_.pop_front();
    return r;
}

void RoomClient::read_loop() {
    room::FrameDecoder decoder;
    std::vector<char> buf(64 * 1024);
    while (!closing_) {
        if (paused_) {
            std::this_thread::sleep_for(5ms);
            continue;
        }
        const std::size_t n = net::recv_some(sock_, buf.data(), buf.size());
        if (n == 0) break;
        decoder.feed(buf.data(), n);
        try {
            while (auto payload = decoder.next()) {
                Received r{room::decode(*payload), std::move(*payload), Clock::now()};
                if (auto* ping = std::get_if<room::PingMsg>(&r.msg)) {
                    send(room::PongMsg{ping->seq, ping->sent});
                    ++pings_answered_;
                    continue;
                }
                if (handler_) {
                    handler_(r);
                } else {
                    std::lock_guard lock(mu_);
                    inbox_.push_back(std::move(r));
                    cv_.notify_one();
                }
            }
        } catch (const ParseError& e) {
            log(LogLevel::Warn, std::string("client: malformed server message: ") + e.what());
            break;
        }
    }
    {
        std::lock_guard send_lock(send_mu_);
        std::lock_guard lock(mu_);
        connected_ = false;
    }
    cv_.notify_all();
}

} // namespace mocap::server
