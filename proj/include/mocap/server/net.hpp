#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Thin POSIX TCP helpers. All functions throw std::system_error on failure.
namespace mocap::server::net {

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.release()) {}
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release();
    void close();
    /// Unblocks readers and writers on other threads without closing the fd.
    void shutdown();

private:
    int fd_ = -1;
};

/// Bound, listening socket. Port 0 picks an ephemeral port.
Socket listen_tcp(const std::string& host, std::uint16_t port, int backlog = 64);
std::uint16_t local_port(const Socket& s);
/// Blocks until a connection arrives; returns an invalid socket if the
/// listener was shut down.
Socket accept_tcp(const Socket& listener);
Socket connect_tcp(const std::string& host, std::uint16_t port);

/// Writes all bytes; returns false if the peer went away.
bool send_all(const Socket& s, std::string_view data);
/// Reads up to n bytes; 0 on orderly shutdown or error.
std::size_t recv_some(const Socket& s, char* buf, std::size_t n);

} // namespace mocap::server::net
