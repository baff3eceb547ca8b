#include "mocap/server/pipeline.hpp"

#include "mocap/core/error.hpp"

namespace mocap::server {

CameraPipeline::CameraPipeline(std::string camera_id, const tracking::TrackerConfig& tracker,
                               const smoothing::SmoothingParams& smooth, const CameraIntrinsics& camera,
                               CameraMetrics* metrics)
    : camera_id_(std::move(camera_id)), tracker_(tracker, camera), smooth_params_(smooth), metrics_(metrics) {
    smooth_params_.validate();
}

namespace {

double ms_since(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double, std::milli>(to - from).count();
}

} // namespace

std::optional<std::vector<std::pair<TrackId, MotionFrame>>> CameraPipeline::process(const DetectionFrame& frame,
                                                                                     Clock::time_point received) {
    if (metrics_) metrics_->detections_in.fetch_add(frame.detections.size(), std::memory_order_relaxed);
    try {
        last_ = tracker_.step(frame);
    } catch (const RejectedInput&) {
        if (metrics_) metrics_->frames_dropped.fetch_add(1, std::memory_order_relaxed);
        return std::nullopt;
    }
    const Clock::time_point tracked = Clock::now();

    for (const TrackId id : last_.removed) {
        banks_.erase(id);
    }
    std::vector<std::pair<TrackId, MotionFrame>> out;
    out.reserve(last_.emitted.size());
    for (const auto& [id, det] : last_.emitted) {
        auto it = banks_.try_emplace(id, smooth_params_).first;
        // Timestamps strictly increase per camera, so a bank never drops here.
        if (auto smoothed = it->second.smooth(MotionFrame::from_detection(id, det), frame.timestamp)) {
            out.emplace_back(id, std::move(*smoothed));
        }
    }

    if (metrics_) {
        const Clock::time_point smoothed = Clock::now();
        std::int64_t active = 0;
        for (const auto& t : tracker_.tracks()) {
            active += t.status == tracking::TrackStatus::Active;
        }
        metrics_->tracks_active.store(active, std::memory_order_relaxed);
        metrics_->detections_rejected.fetch_add(last_.rejected_detections, std::memory_order_relaxed);
        metrics_->person_frames_emitted.fetch_add(out.size(), std::memory_order_relaxed);
        metrics_->ingest_to_tracked.record(ms_since(received, tracked));
        metrics_->tracked_to_smoothed.record(ms_since(tracked, smoothed));
        metrics_->frames_processed.fetch_add(1, std::memory_order_relaxed);
    }
    return out;
}

} // namespace mocap::server
