// End-to-end tests against a real server on loopback.

#include "mocap/core/detection_io.hpp"
#include "mocap/core/error.hpp"
#include "mocap/server/bench.hpp"
#include "mocap/server/client.hpp"
#include "mocap/server/server.hpp"
#include "mocap/sources/evaluation.hpp"
#include "mocap/sources/replay.hpp"
#include "mocap/sources/scenario.hpp"
#include "mocap/tracker/tracker.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

namespace mocap::server {
namespace {

using namespace std::chrono_literals;

ServerConfig ephemeral() {
    ServerConfig cfg;
    cfg.port = 0;
    return cfg;
}

SourceSpec synth(const std::string& name, const std::string& room, const std::string& camera, int persons,
                 double duration, double speed = 1.0) {
    SourceSpec s;
    s.name = name;
    s.room = room;
    s.camera_id = camera;
    s.scenario = "walkers";
    s.persons = persons;
    s.duration = duration;
    s.speed = speed;
    s.noise_trans = 0.0;
    s.noise_pose = 0.0;
    s.dropout = 0.0;
    return s;
}

room::JoinMsg join_req(const std::string& room_id, const std::string& name, const std::string& camera = "") {
    room::JoinMsg j;
    j.room_id = room_id;
    j.display_name = name;
    j.camera_id = camera;
    return j;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("mocap_it_" + name);
}

std::vector<sources::EmittedFrame> track(const std::vector<DetectionFrame>& frames) {
    tracking::Tracker tracker(tracking::TrackerConfig{}, CameraIntrinsics{});
    std::vector<sources::EmittedFrame> out;
    for (const auto& f : frames) {
        out.push_back({f.frame_index, tracker.step(f).emitted});
    }
    return out;
}

TEST(Server, IdleServerAnswersPingAndPingsClients) {
    Server server(ephemeral());
    server.start();
    RoomClient c("127.0.0.1", server.port());
    ASSERT_TRUE(c.send(room::PingMsg{41, 1.5}));
    const auto pong = c.next_of<room::PongMsg>(2s);
    ASSERT_TRUE(pong);
    EXPECT_EQ(pong->seq, 41u);
    EXPECT_EQ(pong->sent, 1.5);
    // The server pings every connection once a second; the client answers.
    const auto deadline = std::chrono::steady_clock::now() + 3s;
    while (c.pings_answered() == 0 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(20ms);
    }
    EXPECT_GE(c.pings_answered(), 1u);
    EXPECT_EQ(server.connection_count(), 1u);
}

TEST(Server, JoinOkAndJoinErr) {
    Server server(ephemeral());
    server.start();
    RoomClient a("127.0.0.1", server.port());
    const auto ok = a.join(join_req("r1", "Ann", "camA"));
    EXPECT_EQ(ok.room_id, "r1");
    EXPECT_EQ(ok.participant_id.size(), 7u);
    EXPECT_EQ(ok.participant_id[0], 'p');
    ASSERT_EQ(ok.roster.size(), 1u);
    EXPECT_EQ(ok.roster[0].display_name, "Ann");
    EXPECT_EQ(ok.roster[0].camera_id, "camA");

    EXPECT_THROW(a.join(join_req("r1", "Ann again")), RejectedInput);
    EXPECT_THROW(a.join(join_req("r2", "Elsewhere")), RejectedInput);

    RoomClient b("127.0.0.1", server.port());
    try {
        b.join(join_req("r1", "Bo", "camA"));
        ADD_FAILURE() << "duplicate camera accepted";
    } catch (const RejectedInput& e) {
        EXPECT_NE(std::string(e.what()).find("camA"), std::string::npos) << e.what();
    }
    auto bad = join_req("r1", "Bo");
    bad.avatar.color = "red";
    EXPECT_THROW(b.join(bad), RejectedInput);
    EXPECT_THROW(b.join(join_req("", "Bo")), RejectedInput);
    // A rejected JOIN leaves the connection usable.
    const auto ok_b = b.join(join_req("r1", "Bo", "camB"));
    EXPECT_NE(ok_b.participant_id, ok.participant_id);
    EXPECT_EQ(ok_b.roster.size(), 2u);
    const auto roster = a.next_of<room::RosterMsg>(2s);
    ASSERT_TRUE(roster);
    EXPECT_EQ(roster->roster.size(), 2u);
}

TEST(Server, SynthSourceIsHeadlessParticipantAndFillsBatches) {
    auto cfg = ephemeral();
    cfg.sources.push_back(synth("walk", "lobby", "cam0", 2, 6.0));
    Server server(cfg);
    server.start();
    RoomClient viewer("127.0.0.1", server.port());
    const auto ok = viewer.join(join_req("lobby", "viewer"));
    ASSERT_EQ(ok.roster.size(), 2u);
    std::size_t headless = 0;
    for (const auto& e : ok.roster) {
        if (e.display_name == "source:walk") {
            ++headless;
            EXPECT_EQ(e.camera_id, "cam0");
        }
    }
    EXPECT_EQ(headless, 1u);

    // Tracks confirm after min_hits frames; from then on both persons appear.
    std::size_t full = 0;
    std::int64_t last_tick = 0;
    const auto deadline = std::chrono::steady_clock::now() + 4s;
    while (full < 30 && std::chrono::steady_clock::now() < deadline) {
        const auto b = viewer.next_of<room::FrameBatchMsg>(1s);
        ASSERT_TRUE(b);
        EXPECT_GT(b->tick, last_tick);
        last_tick = b->tick;
        EXPECT_EQ(b->room_id, "lobby");
        if (b->entries.size() == 2) {
            ++full;
            EXPECT_LT(b->entries[0].person_index, b->entries[1].person_index);
            for (const auto& e : b->entries) {
                EXPECT_EQ(e.camera_id, "cam0");
                EXPECT_EQ(e.joints.size(), 72u);
                EXPECT_GE(e.staleness_ms, 0.0);
            }
        }
        EXPECT_LE(b->entries.size(), 2u);
    }
    EXPECT_EQ(full, 30u);
}

TEST(Server, TickRateWithinTenPercent) {
    auto cfg = ephemeral();
    cfg.room.tick_rate = 50;
    Server server(cfg);
    server.start();
    server.room("timing");
    auto& ticks = server.metrics().room("timing").ticks;
    std::this_thread::sleep_for(200ms);
    const auto t0 = std::chrono::steady_clock::now();
    const auto n0 = ticks.load();
    std::this_thread::sleep_for(2s);
    const auto n1 = ticks.load();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double rate = static_cast<double>(n1 - n0) / s;
    EXPECT_NEAR(rate, 50.0, 5.0);
}

TEST(Server, StalledClientDoesNotDelayOthers) {
    auto cfg = ephemeral();
    cfg.sources.push_back(synth("walk", "lobby", "cam0", 4, 8.0));
    Server server(cfg);
    server.start();
    RoomClient stalled("127.0.0.1", server.port());
    RoomClient live("127.0.0.1", server.port());
    stalled.join(join_req("lobby", "stalled"));
    live.join(join_req("lobby", "live"));
    stalled.pause_reading(true);

    std::this_thread::sleep_for(300ms);
    while (live.next(0ms)) {
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t batches = 0;
    std::int64_t last = 0;
    while (std::chrono::steady_clock::now() - t0 < 2s) {
        if (auto b = live.next_of<room::FrameBatchMsg>(200ms)) {
            EXPECT_GT(b->tick, last);
            last = b->tick;
            ++batches;
        }
    }
    // 30 Hz for 2 s; allow scheduler slack on a loaded single core.
    EXPECT_GE(batches, 50u);
    stalled.pause_reading(false);
    std::int64_t stalled_last = 0;
    for (int i = 0; i < 20; ++i) {
        auto b = stalled.next_of<room::FrameBatchMsg>(1s);
        ASSERT_TRUE(b);
        EXPECT_GT(b->tick, stalled_last);
        stalled_last = b->tick;
    }
}

TEST(Server, RoomsAreIsolated) {
    auto cfg = ephemeral();
    cfg.sources.push_back(synth("a", "alpha", "cam0", 1, 3.0));
    Server server(cfg);
    server.start();
    RoomClient in_alpha("127.0.0.1", server.port());
    RoomClient in_beta("127.0.0.1", server.port());
    in_alpha.join(join_req("alpha", "a"));
    in_beta.join(join_req("beta", "b"));
    EXPECT_TRUE(in_alpha.next_of<room::FrameBatchMsg>(2s));
    EXPECT_FALSE(in_beta.next_of<room::FrameBatchMsg>(1s));
    const auto ids = server.room_ids();
    EXPECT_EQ(ids, (std::vector<std::string>{"alpha", "beta"}));
}

TEST(Server, ClientIngestIsTrackedAndBroadcast) {
    Server server(ephemeral());
    server.start();
    RoomClient cam("127.0.0.1", server.port());
    RoomClient viewer("127.0.0.1", server.port());
    cam.join(join_req("r", "cam", "c1"));
    viewer.join(join_req("r", "viewer"));
    const auto frames = sources::generate(sources::walkers_scenario(1, 1.0, 30.0, 3)).frames;
    std::vector<DetectionFrame> relabelled = frames;
    for (auto& f : relabelled) {
        f.camera_id = "c1";
        for (auto& d : f.detections) d.camera_id = "c1";
    }
    sources::deliver_paced(relabelled, 1.0, [&](const DetectionFrame& f) { return cam.ingest(f); });
    const auto b = viewer.next_of<room::FrameBatchMsg>(2s);
    ASSERT_TRUE(b);
    ASSERT_EQ(b->entries.size(), 1u);
    EXPECT_EQ(b->entries[0].camera_id, "c1");

    // Frames for a camera this connection did not join with are refused.
    DetectionFrame foreign = relabelled.back();
    foreign.camera_id = "other";
    cam.ingest(foreign);
    const auto deadline = std::chrono::steady_clock::now() + 2s;
    while (server.metrics().room("r").ingest_rejected.load() == 0 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(10ms);
    }
    EXPECT_EQ(server.metrics().room("r").ingest_rejected.load(), 1u);
    const auto v = server.metrics().values();
    EXPECT_EQ(v.at("camera.r.c1.frames_in"), static_cast<double>(frames.size()));
    EXPECT_EQ(v.at("camera.r.c1.frames_processed"), static_cast<double>(frames.size()));
    EXPECT_GT(v.at("camera.r.c1.end_to_end.count"), 0.0);
}

TEST(Server, MalformedMessageClosesOnlyThatConnection) {
    Server server(ephemeral());
    server.start();
    RoomClient good("127.0.0.1", server.port());
    good.join(join_req("r", "good"));
    net::Socket raw = net::connect_tcp("127.0.0.1", server.port());
    const std::string junk = room::frame_message("{\"tag\":\"NOPE\"}");
    ASSERT_TRUE(net::send_all(raw, junk));
    char buf[64];
    EXPECT_EQ(net::recv_some(raw, buf, sizeof buf), 0u);  // server hung up
    ASSERT_TRUE(good.send(room::PingMsg{7, 0.0}));
    EXPECT_TRUE(good.next_of<room::PongMsg>(2s));
}

TEST(Server, LeaveUpdatesRoster) {
    Server server(ephemeral());
    server.start();
    RoomClient a("127.0.0.1", server.port());
    a.join(join_req("r", "a"));
    {
        RoomClient b("127.0.0.1", server.port());
        b.join(join_req("r", "b"));
        const auto r = a.next_of<room::RosterMsg>(2s);
        ASSERT_TRUE(r);
        EXPECT_EQ(r->roster.size(), 2u);
        b.close();
    }
    const auto r = a.next_of<room::RosterMsg>(2s);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->roster.size(), 1u);
    EXPECT_EQ(r->roster[0].display_name, "a");
}

TEST(Server, MetricsEndpointServesDump) {
    int free_port = 0;
    {
        net::Socket probe = net::listen_tcp("127.0.0.1", 0);
        free_port = net::local_port(probe);
    }
    auto cfg = ephemeral();
    cfg.metrics_port = free_port;
    Server server(cfg);
    server.start();
    server.room("lobby");
    std::this_thread::sleep_for(100ms);
    httplib::Client http("127.0.0.1", free_port);
    const auto res = http.Get("/metrics");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_NE(res->body.find("room.lobby.ticks "), std::string::npos) << res->body;
}

TEST(Server, BindFailureIsReported) {
    Server first(ephemeral());
    first.start();
    auto cfg = ephemeral();
    cfg.port = first.port();
    Server second(cfg);
    EXPECT_THROW(second.start(), std::system_error);
    second.stop();
}

TEST(Server, RecordThenReplayGivesIdenticalTrackingMetrics) {
    auto spec = sources::crossing_scenario(1.5, 10.0, 30.0, 21);
    spec.dropout_prob = 0.1;
    const auto generated = sources::generate(spec);
    const auto path = temp_path("record.jsonl");

    SourceSpec src = synth("x", "rec", "cam0", 2, 10.0, 0.0);
    src.scenario = "crossing";
    src.depth_gap = 1.5;
    src.seed = 21;
    src.noise_trans = -1;
    src.noise_pose = -1;
    src.dropout = 0.1;
    ASSERT_EQ(src.scenario_spec().seed, spec.seed);

    {
        Server server(ephemeral());
        server.start();
        server.record_room("rec", path);
        server.attach_source(src);
        server.wait_for_sources();
        server.stop_recording();
        server.stop();
    }
    sources::ReplayStats stats;
    const auto replayed = sources::load_replay(path, &stats);
    EXPECT_EQ(stats.malformed_lines, 0u);
    std::vector<Detection> a, b;
    for (const auto& f : generated.frames) a.insert(a.end(), f.detections.begin(), f.detections.end());
    for (const auto& f : replayed) b.insert(b.end(), f.detections.begin(), f.detections.end());
    ASSERT_EQ(a, b);

    const auto live = sources::evaluate_tracking(generated.truth, track(generated.frames));
    const auto again = sources::evaluate_tracking(generated.truth, track(replayed));
    EXPECT_EQ(live, again);
    EXPECT_GT(live.matched, 0u);
    std::filesystem::remove(path);
}

TEST(Server, ConcurrentRecordingsStaySeparate) {
    const auto path_a = temp_path("rec_a.jsonl");
    const auto path_b = temp_path("rec_b.jsonl");
    {
        Server server(ephemeral());
        server.start();
        server.record_room("a", path_a);
        server.record_room("b", path_b);
        server.attach_source(synth("one", "a", "camA", 1, 3.0, 0.0));
        server.attach_source(synth("two", "b", "camB", 2, 3.0, 0.0));
        server.wait_for_sources();
        server.stop_recording();
    }
    const auto fa = sources::load_replay(path_a);
    const auto fb = sources::load_replay(path_b);
    ASSERT_EQ(fa.size(), 90u);
    ASSERT_EQ(fb.size(), 90u);
    for (const auto& f : fa) {
        EXPECT_EQ(f.camera_id, "camA");
        EXPECT_EQ(f.detections.size(), 1u);
    }
    for (const auto& f : fb) {
        EXPECT_EQ(f.camera_id, "camB");
        EXPECT_EQ(f.detections.size(), 2u);
    }
    std::filesystem::remove(path_a);
    std::filesystem::remove(path_b);
}

TEST(Server, TenMinuteReplayAtSpeedZeroIsFast) {
    const auto path = temp_path("ten_minutes.jsonl");
    const auto g = sources::generate(sources::mixed_scenario("cam0", 2, 600.0, 30.0, 4));
    {
        DetectionFileWriter w(path);
        for (const auto& f : g.frames) w.write(f);
    }
    SourceSpec src;
    src.name = "long";
    src.kind = SourceKind::Replay;
    src.room = "long";
    src.file = path.string();
    src.speed = 0.0;
    Server server(ephemeral());
    server.start();
    const auto t0 = std::chrono::steady_clock::now();
    server.attach_source(src);
    server.wait_for_sources();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto v = server.metrics().values();
    EXPECT_EQ(v.at("camera.long.cam0.frames_processed"), 18000.0);
    EXPECT_EQ(v.at("camera.long.cam0.frames_in"), 18000.0);
    EXPECT_LT(s, 10.0);
    RecordProperty("wall_s", std::to_string(s));
    std::filesystem::remove(path);
}

TEST(Server, StopIsIdempotentAndClosesClients) {
    Server server(ephemeral());
    server.start();
    RoomClient c("127.0.0.1", server.port());
    c.join(join_req("r", "c"));
    server.stop();
    server.stop();
    const auto deadline = std::chrono::steady_clock::now() + 2s;
    while (c.connected() && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(10ms);
    }
    EXPECT_FALSE(c.connected());
}

TEST(Bench, ComputeCountsAreDeterministic) {
    BenchOptions opt;
    opt.cameras = 2;
    opt.persons = 2;
    opt.duration = 3.0;
    const auto a = run_compute_bench(ServerConfig{}, opt);
    const auto b = run_compute_bench(ServerConfig{}, opt);
    EXPECT_EQ(a.frames, 180u);
    EXPECT_EQ(a.frames, b.frames);
    EXPECT_EQ(a.person_frames, b.person_frames);
    EXPECT_EQ(a.emitted, b.emitted);
    EXPECT_GT(a.emitted, 0u);
    EXPECT_LE(a.p50_ms, a.p95_ms);
    EXPECT_LE(a.p95_ms, a.p99_ms);
}

TEST(Bench, NetworkRunReportsLatency) {
    BenchOptions opt;
    opt.cameras = 2;
    opt.persons = 1;
    opt.duration = 1.5;
    const auto r = run_network_bench(ServerConfig{}, opt);
    EXPECT_EQ(r.frames_sent, 90u);
    EXPECT_GT(r.batches_received, 0u);
    EXPECT_GT(r.latency_samples, 0u);
    EXPECT_LE(r.p50_ms, r.p95_ms);
    EXPECT_LE(r.p95_ms, r.max_ms + 1e-9);
}

} // namespace
} // namespace mocap::server
