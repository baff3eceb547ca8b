#pragma once

#include "mocap/kinematics/skeleton.hpp"
#include "mocap/room/room.hpp"
#include "mocap/server/config.hpp"
#include "mocap/server/metrics.hpp"
#include "mocap/server/net.hpp"

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace mocap::server {

class CameraWorker;
class Connection;
class Recorder;

/// The room server: accepts TCP clients speaking the framed protocol, runs
/// one tracking pipeline per attached camera and one tick scheduler per room.
///
/// Threads: one acceptor, one reader and one writer per connection, one
/// executor per camera, one ticker per room, one housekeeping thread
/// (pings, health, reaping, periodic metrics) and, if enabled, the HTTP
/// metrics listener.
class Server {
public:
    /// Throws ConfigError if the config is invalid.
    explicit Server(ServerConfig cfg);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listener (and metrics endpoint) and starts the in-process
    /// sources from the config. Throws std::system_error on bind failure.
    void start();
    /// Stops all threads and closes every connection. Idempotent.
    void stop();

    std::uint16_t port() const { return port_; }
    std::uint16_t metrics_port() const { return metrics_port_; }
    const ServerConfig& config() const { return cfg_; }
    /// Monotonic zero of every batch's server_timestamp.
    room::Clock::time_point epoch() const { return epoch_; }

    /// Existing room or a new one with its own ticker.
    std::shared_ptr<room::Room> room(const std::string& room_id);
    std::vector<std::string> room_ids() const;

    /// Starts an in-process source as a headless participant. Returns its
    /// participant id. Throws ConfigError/ParseError for bad specs or files.
    std::string attach_source(const SourceSpec& spec);
    /// Blocks until every in-process source has delivered all frames and its
    /// camera pipeline has drained.
    void wait_for_sources();

    /// Appends every detection frame accepted by the room's camera pipelines
    /// to `path` in replay format. Throws ParseError if the file cannot be created.
    void record_room(const std::string& room_id, const std::filesystem::path& path);
    /// Flushes and closes all recordings.
    void stop_recording();

    MetricsRegistry& metrics() { return metrics_; }
    std::string metrics_text() const { return metrics_.dump(); }
    std::size_t connection_count() const;

private:
    struct RoomSlot;

    std::string next_participant_id();
    std::shared_ptr<CameraWorker> make_worker(const std::string& room_id, const std::string& camera_id,
                                              std::shared_ptr<room::Room> room);
    void accept_loop();
    void housekeeping_loop();
    void tick_loop(RoomSlot* slot);
    void serve_connection(const std::shared_ptr<Connection>& conn);
    void writer_loop(const std::shared_ptr<Connection>& conn);
    void cleanup_connection(Connection& conn);
    void reap_connections(bool all);

    ServerConfig cfg_;
    std::shared_ptr<const kinematics::Skeleton> default_skeleton_;
    room::Clock::time_point epoch_;
    MetricsRegistry metrics_;
    std::atomic<bool> running_{false};
    std::atomic<bool> stopping_{false};
    std::atomic<std::int64_t> next_participant_{1};

    std::uint16_t port_ = 0;
    std::uint16_t metrics_port_ = 0;
    net::Socket listener_;
    std::thread acceptor_;
    std::thread housekeeper_;
    std::thread http_thread_;
    std::unique_ptr<httplib::Server> http_;

    mutable std::mutex mu_;  // guards rooms_, connections_, sources_
    std::condition_variable stop_cv_;
    std::map<std::string, std::unique_ptr<RoomSlot>> rooms_;
    std::list<std::shared_ptr<Connection>> connections_;
    std::vector<std::thread> sources_;
};

} // namespace mocap::server
