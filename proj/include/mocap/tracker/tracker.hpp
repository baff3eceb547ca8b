#pragma once

#include "mocap/core/camera.hpp"
#include "mocap/core/types.hpp"
#include "mocap/tracker/kalman.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mocap::tracking {

enum class TrackStatus { Tentative, Active, Lost };

const char* to_string(TrackStatus s);

struct TrackerConfig {
    double tau_high = 0.5;
    double tau_low = 0.1;
    double gate = 0.25;
    int max_misses = 30;
    int min_hits = 3;
    double lambda_s = 1.0;
    double s_min = 0.01;
    double process_noise = 0.05;
    double obs_noise = 0.01;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

struct Track {
    TrackId id = 0;
    KalmanState kf;
    TrackStatus status = TrackStatus::Tentative;
    int hits = 1;
    int misses = 0;
    Detection last_detection;

    double u() const { return kf.mean(0); }
    double v() const { return kf.mean(1); }
    double s() const { return kf.mean(2); }
    ObsUVZS observation() const { return ObsUVZS(u(), v(), 1.0 / s()); }
};

ConstantVelocityFilter make_filter(const TrackerConfig& cfg, const CameraIntrinsics& k);

/// Advances the track's filter by dt seconds (constant velocity).
Track predict(const Track& track, double dt, const TrackerConfig& cfg, const CameraIntrinsics& k);

/// Normalized image-space distance between the track's current mean and an
/// observation, with a relative inverse-depth term weighted by lambda_s.
double association_cost(const Track& track, const ObsUVZS& obs, const CameraIntrinsics& k,
                         const TrackerConfig& cfg);

struct AssociationResult {
    std::vector<std::pair<TrackId, std::size_t>> matches;
    std::vector<TrackId> unmatched_tracks;
    std::vector<std::size_t> unmatched_high;
    /// Total cost of the ungated stage-1 optimal assignment.
    double stage1_cost = 0.0;
};

/// Two-stage confidence-gated association. Tracks are expected in ascending
/// id order (the order Tracker keeps them in); detections must have z > 0.
AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const CameraIntrinsics& k, const TrackerConfig& cfg);

struct StepResult {
    /// (track_id, detection) for Active tracks matched this frame, ascending id.
    std::vector<std::pair<TrackId, Detection>> emitted;
    std::vector<TrackId> spawned;
    std::vector<TrackId> removed;
    std::size_t rejected_detections = 0;
};

/// Per-camera multi-person tracker over projected root positions. Not
/// thread-safe; one instance per camera stream.
class Tracker {
public:
    Tracker(TrackerConfig cfg, CameraIntrinsics k);

    /// Processes one frame. Throws RejectedInput (state unchanged) when the
    /// frame timestamp does not exceed the previous one. Detections that
    /// fail validation are dropped and counted in the result.
    StepResult step(const DetectionFrame& frame);

    std::span<const Track> tracks() const { return tracks_; }
    const Track* find(TrackId id) const;
    std::int64_t spawned_total() const { return next_id_ - 1; }
    std::optional<double> last_timestamp() const { return last_timestamp_; }

    const TrackerConfig& config() const { return cfg_; }
    const CameraIntrinsics& intrinsics() const { return k_; }

private:
    TrackerConfig cfg_;
    CameraIntrinsics k_;
    ConstantVelocityFilter filter_;
    std::vector<Track> tracks_;  // ascending id
    TrackId next_id_ = 1;
    std::optional<double> last_timestamp_;
};

} // namespace mocap::tracking
