#include "mocap/tracker/tracker.hpp"

#include "mocap/core/error.hpp"
#include "mocap/tracker/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mocap::tracking {

const char* to_string(TrackStatus s) {
    switch (s) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Active: return "active";
    case TrackStatus::Lost: return "lost";
    }
    return "unknown";
}

void TrackerConfig::validate() const {
    if (!(tau_low >= 0.0 && tau_low < tau_high && tau_high <= 1.0)) {
        throw ConfigError("tracker.tau_low/tau_high: require 0 <= tau_low < tau_high <= 1 (got tau_low=" +
                          std::to_string(tau_low) + ", tau_high=" + std::to_string(tau_high) + ")");
    }
    if (!(gate > 0.0)) throw ConfigError("tracker.gate must be > 0");
    if (max_misses < 1) throw ConfigError("tracker.max_misses must be >= 1");
    if (min_hits < 1) throw ConfigError("tracker.min_hits must be >= 1");
    if (!(lambda_s >= 0.0)) throw ConfigError("tracker.lambda_s must be >= 0");
    if (!(s_min > 0.0)) throw ConfigError("tracker.s_min must be > 0");
    if (!(process_noise > 0.0)) throw ConfigError("tracker.process_noise must be > 0");
    if (!(obs_noise > 0.0)) throw ConfigError("tracker.obs_noise must be > 0");
}

ConstantVelocityFilter make_filter(const TrackerConfig& cfg, const CameraIntrinsics& k) {
    ConstantVelocityFilter::Params p;
    p.width = k.width;
    p.height = k.height;
    p.process_noise = cfg.process_noise;
    p.obs_noise = cfg.obs_noise;
    p.s_min = cfg.s_min;
    return ConstantVelocityFilter(p);
}

Track predict(const Track& track, double dt, const TrackerConfig& cfg, const CameraIntrinsics& k) {
    Track out = track;
    out.kf = make_filter(cfg, k).predict(track.kf, dt);
    return out;
}

double association_cost(const Track& track, const ObsUVZS& obs, const CameraIntrinsics& k,
                        const TrackerConfig& cfg) {
    const double du = (track.u() - obs.u()) / k.width;
    const double dv = (track.v() - obs.v()) / k.height;
    const double ds = (track.s() - obs.s()) / std::max(track.s(), obs.s());
    return std::sqrt(du * du + dv * dv + cfg.lambda_s * ds * ds);
}

namespace {

// Matches the given detection subset to the given track subset; gated pairs
// are appended to `matches`, everything else is reported through the flags.
double match_subset(std::span<const Track> tracks, const std::vector<std::size_t>& track_idx,
                    const std::vector<ObsUVZS>& obs, const std::vector<std::size_t>& det_idx,
                    const CameraIntrinsics& k, const TrackerConfig& cfg,
                    std::vector<std::pair<TrackId, std::size_t>>& matches, std::vector<char>& track_matched,
                    std::vector<char>& det_matched) {
    if (track_idx.empty() || det_idx.empty()) {
        return 0.0;
    }
    Eigen::MatrixXd cost(track_idx.size(), det_idx.size());
    for (std::size_t r = 0; r < track_idx.size(); ++r) {
        for (std::size_t c = 0; c < det_idx.size(); ++c) {
            cost(r, c) = association_cost(tracks[track_idx[r]], obs[det_idx[c]], k, cfg);
        }
    }
    const Assignment a = min_cost_assignment(cost);
    for (std::size_t r = 0; r < track_idx.size(); ++r) {
        const int c = a.row_to_col[r];
        if (c < 0 || cost(r, c) > cfg.gate) {
            continue;
        }
        matches.emplace_back(tracks[track_idx[r]].id, det_idx[c]);
        track_matched[track_idx[r]] = 1;
        det_matched[det_idx[c]] = 1;
    }
    return a.total_cost;
}

} // namespace

AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const CameraIntrinsics& k, const TrackerConfig& cfg) {
    AssociationResult out;
    std::vector<ObsUVZS> obs;
    obs.reserve(detections.size());
    for (const auto& d : detections) {
        obs.push_back(project_translation(d.translation, k));
    }

    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        const double c = detections[i].confidence;
        if (c >= cfg.tau_high) {
            high.push_back(i);
        } else if (c >= cfg.tau_low) {
            low.push_back(i);
        }
    }

    std::vector<char> track_matched(tracks.size(), 0);
    std::vector<char> det_matched(detections.size(), 0);

    std::vector<std::size_t> all_tracks(tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) all_tracks[i] = i;
    out.stage1_cost = match_subset(tracks, all_tracks, obs, high, k, cfg, out.matches, track_matched, det_matched);

    std::vector<std::size_t> remaining_active;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!track_matched[i] && tracks[i].status == TrackStatus::Active) {
            remaining_active.push_back(i);
        }
    }
    match_subset(tracks, remaining_active, obs, low, k, cfg, out.matches, track_matched, det_matched);

    std::sort(out.matches.begin(), out.matches.end());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!track_matched[i]) out.unmatched_tracks.push_back(tracks[i].id);
    }
    for (const std::size_t i : high) {
        if (!det_matched[i]) out.unmatched_high.push_back(i);
    }
    return out;
}

Tracker::Tracker(TrackerConfig cfg, CameraIntrinsics k) : cfg_(cfg), k_(k), filter_(make_filter(cfg, k)) {
    cfg_.validate();
    k_.validate();
}

const Track* Tracker::find(TrackId id) const {
    const auto it = std::lower_bound(tracks_.begin(), tracks_.end(), id,
                                     [](const Track& t, TrackId v) { return t.id < v; });
    return it != tracks_.end() && it->id == id ? &*it : nullptr;
}

StepResult Tracker::step(const DetectionFrame& frame) {
    if (last_timestamp_ && !(frame.timestamp > *last_timestamp_)) {
        throw RejectedInput("non-monotone frame timestamp " + std::to_string(frame.timestamp) + " after " +
                            std::to_string(*last_timestamp_));
    }

    StepResult result;
    std::vector<Detection> dets;
    dets.reserve(frame.detections.size());
    for (const auto& d : frame.detections) {
        try {
            validate(d);
            dets.push_back(d);
        } catch (const RejectedInput&) {
            ++result.rejected_detections;
        }
    }

    if (last_timestamp_) {
        const double dt = frame.timestamp - *last_timestamp_;
        for (auto& t : tracks_) {
            t.kf = filter_.predict(t.kf, dt);
        }
    }
    last_timestamp_ = frame.timestamp;

    const AssociationResult assoc = associate(tracks_, dets, k_, cfg_);

    std::vector<char> matched_now(tracks_.size(), 0);
    for (const auto& [id, det_index] : assoc.matches) {
        const auto pos = static_cast<std::size_t>(find(id) - tracks_.data());
        Track& t = tracks_[pos];
        const Detection& d = dets[det_index];
        const ObsUVZS o = project_translation(d.translation, k_);
        t.kf = filter_.update(t.kf, ObsVec(o.u(), o.v(), o.s()));
        t.last_detection = d;
        t.misses = 0;
        ++t.hits;
        if (t.status == TrackStatus::Lost) {
            t.status = TrackStatus::Active;
        } else if (t.status == TrackStatus::Tentative && t.hits >= cfg_.min_hits) {
            t.status = TrackStatus::Active;
        }
        matched_now[pos] = 1;
    }

    std::vector<Track> kept;
    std::vector<char> kept_matched;
    kept.reserve(tracks_.size() + assoc.unmatched_high.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        if (!matched_now[i]) {
            ++t.misses;
            if (t.status == TrackStatus::Tentative) {
                result.removed.push_back(t.id);
                continue;
            }
            if (t.status == TrackStatus::Active) {
                t.status = TrackStatus::Lost;
            }
            if (t.misses > cfg_.max_misses) {
                result.removed.push_back(t.id);
                continue;
            }
        }
        kept.push_back(std::move(t));
        kept_matched.push_back(matched_now[i]);
    }

    for (const std::size_t di : assoc.unmatched_high) {
        const Detection& d = dets[di];
        const ObsUVZS o = project_translation(d.translation, k_);
        Track t;
        t.id = next_id_++;
        t.kf = filter_.initiate(ObsVec(o.u(), o.v(), o.s()));
        t.hits = 1;
        t.misses = 0;
        t.status = cfg_.min_hits <= 1 ? TrackStatus::Active : TrackStatus::Tentative;
        t.last_detection = d;
        result.spawned.push_back(t.id);
        kept.push_back(std::move(t));
        kept_matched.push_back(1);
    }
    tracks_ = std::move(kept);

    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (kept_matched[i] && tracks_[i].status == TrackStatus::Active) {
            result.emitted.emplace_back(tracks_[i].id, tracks_[i].last_detection);
        }
    }
    return result;
}

} // namespace mocap::tracking
