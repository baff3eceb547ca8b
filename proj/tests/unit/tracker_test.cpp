#include "mocap/core/error.hpp"
#include "mocap/sources/evaluation.hpp"
#include "mocap/sources/scenario.hpp"
#include "mocap/tracker/tracker.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace mocap::tracking {
namespace {

CameraIntrinsics round_camera() {
    CameraIntrinsics k;
    k.focal_px = 500.0;
    return k;
}

Track make_track(TrackId id, double u, double v, double s, double du = 0, double dv = 0, double ds = 0) {
    Track t;
    t.id = id;
    t.kf.mean << u, v, s, du, dv, ds;
    t.kf.cov = StateCov::Identity();
    t.status = TrackStatus::Active;
    return t;
}

// Detection whose projection lands on (u, v) at depth z under `k`.
Detection det_at(const CameraIntrinsics& k, double u, double v, double z, double conf) {
    Detection d;
    d.camera_id = "cam0";
    d.confidence = conf;
    d.translation = unproject_obs(ObsUVZS(u, v, z), k);
    return d;
}

TEST(Predict, LinearMotionStep) {
    const TrackerConfig cfg;
    const Track t = make_track(1, 100, 100, 0.5, 30, 0, 0);
    const Track p = predict(t, 1.0 / 30.0, cfg, CameraIntrinsics{});
    EXPECT_NEAR(p.u(), 101.0, 1e-12);
    EXPECT_EQ(p.v(), 100.0);
    EXPECT_EQ(p.s(), 0.5);
    EXPECT_EQ(p.kf.mean.tail<3>(), t.kf.mean.tail<3>());
}

TEST(Predict, StationaryGrowsCovariance) {
    const TrackerConfig cfg;
    const Track t = make_track(1, 200, 150, 0.4);
    for (double dt : {1e-3, 1.0 / 30, 0.5}) {
        const Track p = predict(t, dt, cfg, CameraIntrinsics{});
        EXPECT_EQ(p.kf.mean.head<3>(), t.kf.mean.head<3>());
        EXPECT_GT(p.kf.cov.trace(), t.kf.cov.trace());
    }
}

TEST(Predict, HalfStepsComposeForMean) {
    const TrackerConfig cfg;
    const Track t = make_track(1, 120, 80, 0.3, 17, -4, 0.01);
    const double dt = 0.1;
    const Track once = predict(t, dt, cfg, CameraIntrinsics{});
    const Track twice = predict(predict(t, dt / 2, cfg, CameraIntrinsics{}), dt / 2, cfg, CameraIntrinsics{});
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(once.kf.mean(i), twice.kf.mean(i), 1e-12);
    }
}

TEST(AssociationCost, IdenticalIsZero) {
    const TrackerConfig cfg;
    const auto k = round_camera();
    const Track t = make_track(1, 300, 200, 0.25);
    EXPECT_EQ(association_cost(t, ObsUVZS(300, 200, 4.0), k, cfg), 0.0);
}

TEST(AssociationCost, HandEvaluatedExample) {
    TrackerConfig cfg;
    cfg.lambda_s = 1.0;
    const auto k = round_camera();  // W = H = 512
    const Track t = make_track(1, 256, 256, 0.5);
    EXPECT_DOUBLE_EQ(association_cost(t, ObsUVZS(512, 256, 2.0), k, cfg), 0.5);
}

TEST(AssociationCost, Symmetric) {
    const TrackerConfig cfg;
    const auto k = CameraIntrinsics{};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uv(0, 512), z(0.5, 10);
    for (int i = 0; i < 200; ++i) {
        const ObsUVZS a(uv(rng), uv(rng), z(rng));
        const ObsUVZS b(uv(rng), uv(rng), z(rng));
        const Track ta = make_track(1, a.u(), a.v(), a.s());
        const Track tb = make_track(2, b.u(), b.v(), b.s());
        EXPECT_DOUBLE_EQ(association_cost(ta, b, k, cfg), association_cost(tb, a, k, cfg));
    }
}

TEST(Associate, ColdStart) {
    const auto k = round_camera();
    const std::vector<Detection> dets{det_at(k, 256, 256, 3, 0.9)};
    const auto r = associate({}, dets, k, TrackerConfig{});
    EXPECT_TRUE(r.matches.empty());
    EXPECT_EQ(r.unmatched_high, (std::vector<std::size_t>{0}));
}

TEST(Associate, EmptyInputs) {
    const auto r = associate({}, {}, CameraIntrinsics{}, TrackerConfig{});
    EXPECT_TRUE(r.matches.empty() && r.unmatched_tracks.empty() && r.unmatched_high.empty());
}

TEST(Associate, TwoSeparatedTracksMatchIdentityAgainstEnumeration) {
    const auto k = round_camera();
    const TrackerConfig cfg;
    const std::vector<Track> tracks{make_track(1, 100, 250, 0.33), make_track(2, 400, 260, 0.25)};
    // Detections listed in swapped order.
    const std::vector<Detection> dets{det_at(k, 405, 262, 4.0, 0.9), det_at(k, 98, 251, 3.0, 0.9)};

    Eigen::MatrixXd cost(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            cost(i, j) = association_cost(tracks[i], project_translation(dets[j].translation, k), k, cfg);
        }
    }
    const auto oracle = test::exhaustive_assignment(cost);
    ASSERT_EQ(oracle.row_to_col, (std::vector<int>{1, 0}));

    const auto r = associate(tracks, dets, k, cfg);
    ASSERT_EQ(r.matches.size(), 2u);
    EXPECT_EQ(r.matches[0], (std::pair<TrackId, std::size_t>{1, 1}));
    EXPECT_EQ(r.matches[1], (std::pair<TrackId, std::size_t>{2, 0}));
    EXPECT_EQ(r.stage1_cost, oracle.total_cost);
}

TEST(Associate, LowConfidenceRecoversActiveTrackInStageTwo) {
    const auto k = round_camera();
    TrackerConfig cfg;
    cfg.tau_low = 0.1;
    cfg.tau_high = 0.5;
    const std::vector<Track> tracks{make_track(1, 256, 256, 0.5)};
    const std::vector<Detection> dets{det_at(k, 260, 255, 2.0, 0.3)};
    const auto r = associate(tracks, dets, k, cfg);
    ASSERT_EQ(r.matches.size(), 1u);
    EXPECT_EQ(r.matches[0].first, 1);
    EXPECT_TRUE(r.unmatched_high.empty());
}

TEST(Associate, LowConfidenceNeverRecoversTentativeOrLost) {
    const auto k = round_camera();
    const TrackerConfig cfg;
    std::vector<Track> tracks{make_track(1, 256, 256, 0.5), make_track(2, 100, 100, 0.5)};
    tracks[0].status = TrackStatus::Tentative;
    tracks[1].status = TrackStatus::Lost;
    const std::vector<Detection> dets{det_at(k, 256, 256, 2.0, 0.3), det_at(k, 100, 100, 2.0, 0.3)};
    const auto r = associate(tracks, dets, k, cfg);
    EXPECT_TRUE(r.matches.empty());
    EXPECT_TRUE(r.unmatched_high.empty());  // low leftovers are dropped
}

TEST(Associate, BelowTauLowIgnored) {
    const auto k = round_camera();
    const std::vector<Track> tracks{make_track(1, 256, 256, 0.5)};
    const std::vector<Detection> dets{det_at(k, 256, 256, 2.0, 0.05)};
    const auto r = associate(tracks, dets, k, TrackerConfig{});
    EXPECT_TRUE(r.matches.empty());
    EXPECT_EQ(r.unmatched_tracks, (std::vector<TrackId>{1}));
}

TEST(Associate, GatedPairsDiscarded) {
    const auto k = round_camera();
    const std::vector<Track> tracks{make_track(1, 0, 256, 0.5)};
    const std::vector<Detection> dets{det_at(k, 500, 256, 2.0, 0.9)};
    const auto r = associate(tracks, dets, k, TrackerConfig{});
    EXPECT_TRUE(r.matches.empty());
    EXPECT_EQ(r.unmatched_high.size(), 1u);
    EXPECT_EQ(r.unmatched_tracks.size(), 1u);
}

TEST(Associate, OptimalityAndNoDuplicatesOnRandomInstances) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> uv(0, 512), z(1, 8), conf(0.5, 1.0);
    const auto k = CameraIntrinsics{};
    TrackerConfig cfg;
    cfg.gate = 1e9;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Track> tracks;
        const int nt = count(rng), nd = count(rng);
        for (int i = 0; i < nt; ++i) tracks.push_back(make_track(i + 1, uv(rng), uv(rng), 1.0 / z(rng)));
        std::vector<Detection> dets;
        for (int j = 0; j < nd; ++j) dets.push_back(det_at(k, uv(rng), uv(rng), z(rng), conf(rng)));

        Eigen::MatrixXd cost(nt, nd);
        for (int i = 0; i < nt; ++i) {
            for (int j = 0; j < nd; ++j) {
                cost(i, j) = association_cost(tracks[i], project_translation(dets[j].translation, k), k, cfg);
            }
        }
        const auto oracle = test::exhaustive_assignment(cost);
        const auto r = associate(tracks, dets, k, cfg);
        ASSERT_EQ(r.stage1_cost, oracle.total_cost);
        ASSERT_EQ(r.matches.size(), static_cast<std::size_t>(std::min(nt, nd)));
        std::set<TrackId> seen_t;
        std::set<std::size_t> seen_d;
        for (const auto& [t, d] : r.matches) {
            ASSERT_TRUE(seen_t.insert(t).second);
            ASSERT_TRUE(seen_d.insert(d).second);
        }
    }
}

DetectionFrame frame_of(std::int64_t index, double t, std::vector<Detection> dets) {
    DetectionFrame f;
    f.camera_id = "cam0";
    f.frame_index = index;
    f.timestamp = t;
    for (auto& d : dets) {
        d.frame_index = index;
        d.timestamp = t;
    }
    f.detections = std::move(dets);
    return f;
}

TEST(Step, SingleLinearWalkerLifecycle) {
    const auto k = CameraIntrinsics{};
    TrackerConfig cfg;
    cfg.min_hits = 3;
    Tracker tracker(cfg, k);
    std::set<TrackId> ids;
    std::size_t emitted = 0;
    for (int i = 0; i < 10; ++i) {
        const double t = i / 30.0;
        Detection d;
        d.confidence = 0.9;
        d.translation = Vec3(-0.5 + 0.3 * t, 0.2, 3.0 + 0.1 * t);
        const auto r = tracker.step(frame_of(i, t, {d}));
        for (const auto& [id, det] : r.emitted) {
            ids.insert(id);
            ++emitted;
        }
        for (const auto& tr : tracker.tracks()) ids.insert(tr.id);
    }
    EXPECT_EQ(ids.size(), 1u);
    EXPECT_EQ(emitted, 10u - (3 - 1));
    EXPECT_EQ(tracker.spawned_total(), 1);
}

TEST(Step, ReappearanceBeyondGateAfterMaxMissesGetsNewId) {
    const auto k = CameraIntrinsics{};
    TrackerConfig cfg;
    cfg.max_misses = 5;
    cfg.min_hits = 1;
    Tracker tracker(cfg, k);
    Detection d;
    d.confidence = 0.9;
    d.translation = Vec3(-1.0, 0.2, 3.0);
    int frame = 0;
    for (; frame < 5; ++frame) tracker.step(frame_of(frame, frame / 30.0, {d}));
    ASSERT_EQ(tracker.tracks().size(), 1u);
    const TrackId old_id = tracker.tracks()[0].id;

    for (int gap = 0; gap < cfg.max_misses; ++gap, ++frame) {
        const auto r = tracker.step(frame_of(frame, frame / 30.0, {}));
        EXPECT_TRUE(r.emitted.empty());
    }
    ASSERT_EQ(tracker.tracks().size(), 1u);
    EXPECT_EQ(tracker.tracks()[0].status, TrackStatus::Lost);

    d.translation = Vec3(1.5, 0.2, 3.0);  // far beyond the gate
    const auto r = tracker.step(frame_of(frame, frame / 30.0, {d}));
    EXPECT_EQ(r.removed, (std::vector<TrackId>{old_id}));
    ASSERT_EQ(r.emitted.size(), 1u);
    EXPECT_NE(r.emitted[0].first, old_id);
    EXPECT_EQ(tracker.find(old_id), nullptr);
}

TEST(Step, LostTrackRecoversSameId) {
    const auto k = CameraIntrinsics{};
    TrackerConfig cfg;
    cfg.min_hits = 1;
    Tracker tracker(cfg, k);
    Detection d;
    d.confidence = 0.9;
    d.translation = Vec3(0.0, 0.2, 3.0);
    tracker.step(frame_of(0, 0.0, {d}));
    tracker.step(frame_of(1, 1 / 30.0, {}));
    EXPECT_EQ(tracker.tracks()[0].status, TrackStatus::Lost);
    const auto r = tracker.step(frame_of(2, 2 / 30.0, {d}));
    ASSERT_EQ(r.emitted.size(), 1u);
    EXPECT_EQ(r.emitted[0].first, 1);
    EXPECT_EQ(tracker.tracks()[0].status, TrackStatus::Active);
    EXPECT_EQ(tracker.tracks()[0].misses, 0);
}

TEST(Step, EmptyFrameAgesTracks) {
    Tracker tracker(TrackerConfig{}, CameraIntrinsics{});
    Detection d;
    d.confidence = 0.9;
    for (int i = 0; i < 4; ++i) tracker.step(frame_of(i, i / 30.0, {d}));
    const auto r = tracker.step(frame_of(4, 4 / 30.0, {}));
    EXPECT_TRUE(r.emitted.empty());
    ASSERT_EQ(tracker.tracks().size(), 1u);
    EXPECT_EQ(tracker.tracks()[0].misses, 1);
}

TEST(Step, TentativeDiesOnFirstMiss) {
    Tracker tracker(TrackerConfig{}, CameraIntrinsics{});
    Detection d;
    d.confidence = 0.9;
    tracker.step(frame_of(0, 0.0, {d}));
    const auto r = tracker.step(frame_of(1, 0.1, {}));
    EXPECT_EQ(r.removed, (std::vector<TrackId>{1}));
    EXPECT_TRUE(tracker.tracks().empty());
}

TEST(Step, NonMonotoneTimestampRejectedWithoutStateChange) {
    Tracker tracker(TrackerConfig{}, CameraIntrinsics{});
    Detection d;
    d.confidence = 0.9;
    tracker.step(frame_of(0, 1.0, {d}));
    const auto before = tracker.tracks()[0];
    EXPECT_THROW(tracker.step(frame_of(1, 1.0, {d})), RejectedInput);
    EXPECT_THROW(tracker.step(frame_of(1, 0.5, {d})), RejectedInput);
    EXPECT_EQ(tracker.tracks().size(), 1u);
    EXPECT_EQ(tracker.tracks()[0].hits, before.hits);
    EXPECT_EQ(tracker.last_timestamp(), 1.0);
}

TEST(Step, InvalidDetectionsCounted) {
    Tracker tracker(TrackerConfig{}, CameraIntrinsics{});
    Detection good, behind, bad_conf;
    good.confidence = 0.9;
    behind.confidence = 0.9;
    behind.translation.z() = -1.0;
    bad_conf.confidence = 1.5;
    const auto r = tracker.step(frame_of(0, 0.0, {good, behind, bad_conf}));
    EXPECT_EQ(r.rejected_detections, 2u);
    EXPECT_EQ(tracker.tracks().size(), 1u);
}

TEST(Step, ScaleStaysPositive) {
    TrackerConfig cfg;
    cfg.min_hits = 1;
    Tracker tracker(cfg, CameraIntrinsics{});
    // Person receding fast: s decreases toward zero.
    for (int i = 0; i < 60; ++i) {
        Detection d;
        d.confidence = 0.9;
        d.translation = Vec3(0.0, 0.0, 2.0 + 3.0 * i);
        tracker.step(frame_of(i, i / 30.0, {d}));
        for (const auto& t : tracker.tracks()) {
            ASSERT_GE(t.s(), cfg.s_min);
        }
    }
}

std::vector<sources::EmittedFrame> run(Tracker& tracker, const sources::GeneratedScenario& sc) {
    std::vector<sources::EmittedFrame> out;
    for (const auto& f : sc.frames) {
        sources::EmittedFrame e;
        e.frame_index = f.frame_index;
        e.pairs = tracker.step(f).emitted;
        out.push_back(std::move(e));
    }
    return out;
}

TEST(Step, IdentityPreservationForNonIntersectingWalkers) {
    const TrackerConfig cfg;
    for (int n = 1; n <= 5; ++n) {
        const auto sc = sources::generate(sources::walkers_scenario(n, 10.0, 30.0, 100 + n));
        Tracker tracker(cfg, CameraIntrinsics{});
        const auto emitted = run(tracker, sc);

        std::map<int, std::set<TrackId>> person_to_ids;
        std::map<TrackId, std::set<int>> id_to_persons;
        for (std::size_t f = 0; f < sc.frames.size(); ++f) {
            for (const auto& [id, det] : emitted[f].pairs) {
                for (const auto& [person, truth] : sc.truth[f].persons) {
                    if ((truth.translation - det.translation).norm() < 1e-12) {
                        person_to_ids[person].insert(id);
                        id_to_persons[id].insert(person);
                    }
                }
            }
        }
        ASSERT_EQ(person_to_ids.size(), static_cast<std::size_t>(n));
        for (const auto& [p, ids] : person_to_ids) EXPECT_EQ(ids.size(), 1u) << "n=" << n;
        for (const auto& [id, ps] : id_to_persons) EXPECT_EQ(ps.size(), 1u) << "n=" << n;
        EXPECT_EQ(sources::evaluate_tracking(sc.truth, emitted).id_switches, 0u);
    }
}

TEST(Step, DeterministicAndIdsNeverReused) {
    auto spec = sources::mixed_scenario("cam0", 3, 8.0, 30.0, 5);
    spec.dropout_prob = 0.2;
    const auto sc = sources::generate(spec);
    Tracker a(TrackerConfig{}, CameraIntrinsics{});
    Tracker b(TrackerConfig{}, CameraIntrinsics{});
    std::set<TrackId> removed;
    for (const auto& f : sc.frames) {
        const auto ra = a.step(f);
        const auto rb = b.step(f);
        ASSERT_EQ(ra.emitted.size(), rb.emitted.size());
        for (std::size_t i = 0; i < ra.emitted.size(); ++i) {
            ASSERT_EQ(ra.emitted[i].first, rb.emitted[i].first);
        }
        for (const TrackId id : ra.spawned) ASSERT_FALSE(removed.count(id));
        removed.insert(ra.removed.begin(), ra.removed.end());
        ASSERT_TRUE(std::is_sorted(ra.emitted.begin(), ra.emitted.end(),
                                   [](const auto& x, const auto& y) { return x.first < y.first; }));
        ASSERT_LE(static_cast<std::int64_t>(a.tracks().size()), a.spawned_total());
    }
}

TEST(TrackerConfig, Validation) {
    TrackerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.tau_low = 0.6;
    try {
        cfg.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("tau_low"), std::string::npos);
    }
    cfg = {};
    cfg.max_misses = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.gate = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

} // namespace
} // namespace mocap::tracking
