#include "mocap/server/server.hpp"

#include "mocap/core/detection_io.hpp"
#include "mocap/core/error.hpp"
#include "mocap/room/protocol.hpp"
#include "mocap/room/rtt.hpp"
#include "mocap/server/bounded_queue.hpp"
#include "mocap/server/log.hpp"
#include "mocap/server/net.hpp"
#include "mocap/server/pipeline.hpp"
#include "mocap/sources/replay.hpp"
#include "mocap/sources/scenario.hpp"

#include <httplib.h>

#include <cstdio>
#include <set>

namespace mocap::server {

using room::Clock;
using namespace std::chrono_literals;

namespace {

constexpr std::size_t kCameraQueueDepth = 64;
constexpr auto kPingInterval = 1s;
constexpr auto kHousekeepingPeriod = 100ms;

room::Payload make_payload(const room::Message& msg) {
    return std::make_shared<const std::string>(room::frame_message(room::encode(msg)));
}

} // namespace

/// Serialized append-only replay writer shared by a room's cameras.
class Recorder {
public:
    explicit Recorder(const std::filesystem::path& path) : writer_(path) {}

    void write(const DetectionFrame& frame) {
        std::lock_guard lock(mu_);
        writer_.write(frame);
    }

    void flush() {
        std::lock_guard lock(mu_);
        writer_.flush();
    }

private:
    std::mutex mu_;
    DetectionFileWriter writer_;
};

/// Executor for one camera: drains its bounded queue through the pipeline
/// and feeds the room.
class CameraWorker {
public:
    CameraWorker(std::string camera_id, CameraPipeline pipeline, std::shared_ptr<room::Room> room,
                 CameraMetrics& metrics, std::function<std::shared_ptr<Recorder>()> recorder)
        : camera_id_(std::move(camera_id)),
          pipeline_(std::move(pipeline)),
          room_(std::move(room)),
          metrics_(metrics),
          recorder_(std::move(recorder)),
          queue_(kCameraQueueDepth),
          thread_([this] { run(); }) {}

    ~CameraWorker() { finish(); }

    /// Blocks while the queue is full. Returns false once the worker is finishing.
    bool submit(DetectionFrame frame, Clock::time_point received) {
        metrics_.frames_in.fetch_add(1, std::memory_order_relaxed);
        if (!queue_.push(Job{std::move(frame), received})) {
            metrics_.frames_dropped.fetch_add(1, std::memory_order_relaxed);
            return false;
        }
        return true;
    }

    /// Processes everything already queued, then stops.
    void finish() {
        queue_.close();
        std::lock_guard lock(join_mu_);
        if (thread_.joinable()) {
            thread_.join();
        }
    }

    std::size_t in_flight() const { return queue_.size(); }

private:
    struct Job {
        DetectionFrame frame;
        Clock::time_point received;
    };

    void run() {
        while (auto job = queue_.pop()) {
            auto out = pipeline_.process(job->frame, job->received);
            if (!out) {
                continue;
            }
            if (auto rec = recorder_()) {
                rec->write(job->frame);
            }
            if (!out->empty()) {
                room_->ingest(camera_id_, *out, Clock::now(), job->received);
            }
        }
    }

    std::string camera_id_;
    CameraPipeline pipeline_;
    std::shared_ptr<room::Room> room_;
    CameraMetrics& metrics_;
    std::function<std::shared_ptr<Recorder>()> recorder_;
    BoundedQueue<Job> queue_;
    std::mutex join_mu_;
    std::thread thread_;
};

/// One client connection. Reader-thread state is touched only by that
/// thread; `mu` guards what housekeeping reads.
class Connection {
public:
    explicit Connection(net::Socket s, std::size_t outbox_depth)
        : sock(std::move(s)), outbox(std::make_shared<room::Outbox>(outbox_depth)) {}

    net::Socket sock;
    std::shared_ptr<room::Outbox> outbox;
    std::thread reader;
    std::thread writer;
    std::atomic<bool> reader_done{false};

    std::string room_id;
    std::string camera_id;
    std::shared_ptr<room::Room> room;
    std::shared_ptr<CameraWorker> worker;

    std::mutex mu;
    std::string participant_id;
    room::RttEstimator rtt;
    Clock::time_point last_ping{};
};

struct Server::RoomSlot {
    std::shared_ptr<room::Room> room;
    RoomMetrics* metrics = nullptr;
    std::thread ticker;
    std::mutex rec_mu;
    std::shared_ptr<Recorder> recorder;

    std::shared_ptr<Recorder> current_recorder() {
        std::lock_guard lock(rec_mu);
        return recorder;
    }
};

Server::Server(ServerConfig cfg) : cfg_(std::move(cfg)), epoch_(Clock::now()) {
    cfg_.validate();
    if (!cfg_.skeleton.empty()) {
        default_skeleton_ = std::make_shared<const kinematics::Skeleton>(kinematics::load_skeleton(cfg_.skeleton));
    }
}

Server::~Server() { stop(); }

void Server::start() {
    if (running_.exchange(true)) {
        return;
    }
    try {
        listener_ = net::listen_tcp(cfg_.host, static_cast<std::uint16_t>(cfg_.port));
    } catch (...) {
        running_ = false;
        throw;
    }
    port_ = net::local_port(listener_);

    if (cfg_.metrics_port != 0) {
        http_ = std::make_unique<httplib::Server>();
        http_->Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(metrics_text(), "text/plain");
        });
        if (!http_->bind_to_port(cfg_.host, cfg_.metrics_port)) {
            listener_.close();
            running_ = false;
            throw std::system_error(std::make_error_code(std::errc::address_in_use),
                                    "cannot bind metrics endpoint on port " + std::to_string(cfg_.metrics_port));
        }
        metrics_port_ = static_cast<std::uint16_t>(cfg_.metrics_port);
        http_thread_ = std::thread([this] { http_->listen_after_bind(); });
    }

    acceptor_ = std::thread([this] { accept_loop(); });
    housekeeper_ = std::thread([this] { housekeeping_loop(); });
    log(LogLevel::Info, "listening on " + cfg_.host + ":" + std::to_string(port_));

    for (const SourceSpec& s : cfg_.sources) {
        attach_source(s);
    }
}

void Server::stop() {
    if (!running_.exchange(false)) {
        return;
    }
    stopping_ = true;
    stop_cv_.notify_all();

    listener_.shutdown();
    if (acceptor_.joinable()) acceptor_.join();
    listener_.close();
    if (http_) {
        http_->stop();
        if (http_thread_.joinable()) http_thread_.join();
    }
    if (housekeeper_.joinable()) housekeeper_.join();

    wait_for_sources();
    reap_connections(true);

    std::map<std::string, std::unique_ptr<RoomSlot>> rooms;
    {
        std::lock_guard lock(mu_);
        rooms.swap(rooms_);
    }
    for (auto& [id, slot] : rooms) {
        if (slot->ticker.joinable()) slot->ticker.join();
        if (auto rec = slot->current_recorder()) rec->flush();
    }
}

std::string Server::next_participant_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%06lld", static_cast<long long>(next_participant_++));
    return buf;
}

std::shared_ptr<room::Room> Server::room(const std::string& room_id) {
    std::lock_guard lock(mu_);
    auto& slot = rooms_[room_id];
    if (!slot) {
        slot = std::make_unique<RoomSlot>();
        slot->room = std::make_shared<room::Room>(room_id, cfg_.room, epoch_, default_skeleton_);
        slot->metrics = &metrics_.room(room_id);
        RoomSlot* raw = slot.get();
        slot->ticker = std::thread([this, raw] { tick_loop(raw); });
        log(LogLevel::Info, "room '" + room_id + "' created");
    }
    return slot->room;
}

std::vector<std::string> Server::room_ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, slot] : rooms_) out.push_back(id);
    return out;
}

std::size_t Server::connection_count() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& c : connections_) n += !c->reader_done.load();
    return n;
}

void Server::tick_loop(RoomSlot* slot) {
    const auto interval = cfg_.room.tick_interval();
    auto next = Clock::now();
    for (;;) {
        next += interval;
        {
            std::unique_lock lock(mu_);
            if (stop_cv_.wait_until(lock, next, [this] { return stopping_.load(); })) {
                return;
            }
        }
        const auto now = Clock::now();
        if (now - next > interval) {
            next = now;  // fell behind; do not burst
        }
        const room::TickReport r = slot->room->tick(now);
        slot->metrics->ticks.fetch_add(1, std::memory_order_relaxed);
        slot->metrics->evictions.fetch_add(r.evicted, std::memory_order_relaxed);
        slot->metrics->queue_drops.fetch_add(r.queue_drops, std::memory_order_relaxed);
        slot->metrics->ingest_dropped.store(slot->room->ingest_dropped(), std::memory_order_relaxed);
        if (r.payload) {
            slot->metrics->batches_sent.fetch_add(1, std::memory_order_relaxed);
        }
        CameraMetrics* cached = nullptr;
        const std::string* cached_id = nullptr;
        for (const room::FreshEntry& fe : r.fresh) {
            if (!cached_id || *cached_id != fe.camera_id) {
                cached = &metrics_.camera(slot->room->id(), fe.camera_id);
                cached_id = &fe.camera_id;
            }
            cached->end_to_end.record(fe.since_detected_ms);
            cached->smoothed_to_enqueued.record(fe.since_ingest_ms);
        }
    }
}

std::shared_ptr<CameraWorker> Server::make_worker(const std::string& room_id, const std::string& camera_id,
                                                  std::shared_ptr<room::Room> room) {
    CameraMetrics& m = metrics_.camera(room_id, camera_id);
    RoomSlot* slot = nullptr;
    {
        std::lock_guard lock(mu_);
        slot = rooms_.at(room_id).get();
    }
    return std::make_shared<CameraWorker>(camera_id, CameraPipeline(camera_id, cfg_.tracker, cfg_.smoothing, cfg_.camera, &m),
                                          std::move(room), m, [slot] { return slot->current_recorder(); });
}

void Server::record_room(const std::string& room_id, const std::filesystem::path& path) {
    auto rec = std::make_shared<Recorder>(path);
    room(room_id);
    std::lock_guard lock(mu_);
    RoomSlot* slot = rooms_.at(room_id).get();
    std::lock_guard rec_lock(slot->rec_mu);
    slot->recorder = std::move(rec);
    log(LogLevel::Info, "recording room '" + room_id + "' to " + path.string());
}

void Server::stop_recording() {
    std::lock_guard lock(mu_);
    for (auto& [id, slot] : rooms_) {
        std::lock_guard rec_lock(slot->rec_mu);
        if (slot->recorder) {
            slot->recorder->flush();
            slot->recorder.reset();
        }
    }
}

std::string Server::attach_source(const SourceSpec& spec) {
    spec.validate();
    std::vector<DetectionFrame> frames;
    if (spec.kind == SourceKind::Synth) {
        frames = sources::generate(spec.scenario_spec()).frames;
    } else {
        frames = sources::load_replay(spec.file);
        std::set<std::string> cameras;
        for (const auto& f : frames) cameras.insert(f.camera_id);
        if (!cameras.count(spec.camera_id)) {
            if (cameras.size() > 1) {
                throw ConfigError("source." + spec.name + ".camera_id: replay file holds several cameras; pick one");
            }
        } else {
            std::erase_if(frames, [&](const DetectionFrame& f) { return f.camera_id != spec.camera_id; });
        }
        for (auto& f : frames) {
            f.camera_id = spec.camera_id;
            for (auto& d : f.detections) d.camera_id = spec.camera_id;
        }
    }

    auto r = room(spec.room);
    const std::string pid = next_participant_id();
    room::JoinMsg req;
    req.room_id = spec.room;
    req.display_name = "source:" + spec.name;
    req.camera_id = spec.camera_id;
    try {
        r->join(pid, req, nullptr);
    } catch (const RejectedInput& e) {
        throw ConfigError("source." + spec.name + ": " + e.what());
    }
    auto worker = make_worker(spec.room, spec.camera_id, r);
    log(LogLevel::Info, "source '" + spec.name + "' (" + to_string(spec.kind) + ") attached to room '" + spec.room +
                            "' as " + pid);

    std::lock_guard lock(mu_);
    sources_.emplace_back([this, frames = std::move(frames), speed = spec.speed, worker, r, pid] {
        sources::deliver_paced(frames, speed, [&](const DetectionFrame& f) {
            return !stopping_.load() && worker->submit(f, Clock::now());
        });
        worker->finish();
        r->leave(pid);
    });
    return pid;
}

void Server::wait_for_sources() {
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(mu_);
        threads.swap(sources_);
    }
    for (auto& t : threads) t.join();
}

void Server::accept_loop() {
    for (;;) {
        net::Socket s = net::accept_tcp(listener_);
        if (!s.valid() || stopping_) {
            return;
        }
        auto conn = std::make_shared<Connection>(std::move(s), cfg_.room.outbox_depth);
        std::lock_guard lock(mu_);
        if (stopping_) return;
        connections_.push_back(conn);
        conn->writer = std::thread([this, conn] { writer_loop(conn); });
        conn->reader = std::thread([this, conn] { serve_connection(conn); });
    }
}

void Server::writer_loop(const std::shared_ptr<Connection>& conn) {
    for (;;) {
        auto p = conn->outbox->pop(100ms);
        if (!p) {
            if (conn->outbox->closed()) return;
            continue;
        }
        if (!net::send_all(conn->sock, **p)) {
            conn->sock.shutdown();
            conn->outbox->close();
            return;
        }
    }
}

void Server::serve_connection(const std::shared_ptr<Connection>& conn) {
    room::FrameDecoder decoder;
    std::vector<char> buf(64 * 1024);
    bool open = true;
    while (open && !stopping_) {
        const std::size_t n = net::recv_some(conn->sock, buf.data(), buf.size());
        if (n == 0) break;
        decoder.feed(buf.data(), n);
        try {
            while (open) {
                auto payload = decoder.next();
                if (!payload) break;
                const room::Message msg = room::decode(*payload);
                const auto received = Clock::now();
                if (auto* join = std::get_if<room::JoinMsg>(&msg)) {
                    if (conn->room) {
                        conn->outbox->push_control(make_payload(room::JoinErrMsg{"already joined"}));
                        continue;
                    }
                    if (join->room_id.empty()) {
                        conn->outbox->push_control(make_payload(room::JoinErrMsg{"room_id must not be empty"}));
                        continue;
                    }
                    auto r = room(join->room_id);
                    const std::string pid = next_participant_id();
                    try {
                        r->join(pid, *join, conn->outbox);
                    } catch (const RejectedInput& e) {
                        conn->outbox->push_control(make_payload(room::JoinErrMsg{e.what()}));
                        continue;
                    }
                    conn->room = r;
                    conn->room_id = join->room_id;
                    conn->camera_id = join->camera_id;
                    if (!join->camera_id.empty()) {
                        conn->worker = make_worker(join->room_id, join->camera_id, r);
                    }
                    std::lock_guard lock(conn->mu);
                    conn->participant_id = pid;
                } else if (auto* ingest = std::get_if<room::IngestMsg>(&msg)) {
                    if (!conn->worker || ingest->frame.camera_id != conn->camera_id) {
                        if (conn->room) {
                            metrics_.room(conn->room_id).ingest_rejected.fetch_add(1, std::memory_order_relaxed);
                        }
                        continue;
                    }
                    conn->worker->submit(ingest->frame, received);
                } else if (auto* ping = std::get_if<room::PingMsg>(&msg)) {
                    conn->outbox->push_control(make_payload(room::PongMsg{ping->seq, ping->sent}));
                } else if (auto* pong = std::get_if<room::PongMsg>(&msg)) {
                    std::lock_guard lock(conn->mu);
                    conn->rtt.pong_received(pong->seq, received);
                } else if (std::holds_alternative<room::LeaveMsg>(msg)) {
                    open = false;
                } else {
                    log(LogLevel::Warn, std::string("ignoring client message ") + room::tag_of(msg));
                }
            }
        } catch (const ParseError& e) {
            log(LogLevel::Warn, std::string("closing connection after malformed message: ") + e.what());
            break;
        }
    }
    cleanup_connection(*conn);
}

void Server::cleanup_connection(Connection& conn) {
    if (conn.worker) {
        conn.worker->finish();
    }
    std::string pid;
    {
        std::lock_guard lock(conn.mu);
        pid = conn.participant_id;
    }
    if (conn.room && !pid.empty()) {
        conn.room->leave(pid);
        metrics_.forget_participant(pid);
    }
    conn.outbox->close();
    conn.sock.shutdown();
    conn.reader_done = true;
}

void Server::reap_connections(bool all) {
    std::list<std::shared_ptr<Connection>> finished;
    {
        std::lock_guard lock(mu_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            if (all || (*it)->reader_done) {
                if (all) (*it)->sock.shutdown();
                finished.push_back(*it);
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : finished) {
        if (c->reader.joinable()) c->reader.join();
        c->outbox->close();
        if (c->writer.joinable()) c->writer.join();
    }
}

void Server::housekeeping_loop() {
    auto next_export = Clock::now();
    const auto export_every = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(cfg_.metrics_interval_s));
    if (cfg_.metrics_interval_s > 0) next_export += export_every;
    for (;;) {
        {
            std::unique_lock lock(mu_);
            if (stop_cv_.wait_for(lock, kHousekeepingPeriod, [this] { return stopping_.load(); })) {
                return;
            }
        }
        const auto now = Clock::now();
        std::vector<std::shared_ptr<Connection>> conns;
        {
            std::lock_guard lock(mu_);
            conns.assign(connections_.begin(), connections_.end());
        }
        for (auto& c : conns) {
            if (c->reader_done) continue;
            std::lock_guard lock(c->mu);
            if (!c->rtt.awaiting_pong() && now - c->last_ping >= kPingInterval) {
                const auto seq = c->rtt.ping_sent(now);
                c->last_ping = now;
                c->outbox->push_control(
                    make_payload(room::PingMsg{seq, std::chrono::duration<double>(now - epoch_).count()}));
            }
            const bool healthy = c->rtt.check(now);
            if (!c->participant_id.empty()) {
                metrics_.set_rtt(c->participant_id, c->rtt.estimate_ms().value_or(-1.0), healthy);
            }
        }
        reap_connections(false);
        if (cfg_.metrics_interval_s > 0 && now >= next_export) {
            next_export = now + export_every;
            log(LogLevel::Info, "metrics\n" + metrics_text());
        }
    }
}

} // namespace mocap::server
