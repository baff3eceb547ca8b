#include "mocap/room/room.hpp"

#include "mocap/core/error.hpp"
#include "mocap/kinematics/forward_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mocap::room {

void RoomConfig::validate() const {
    if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) {
        throw ConfigError("room.tick_rate must be positive");
    }
    if (!(stale_evict_ms > 0.0) || !std::isfinite(stale_evict_ms)) {
        throw ConfigError("room.stale_evict_ms must be positive");
    }
    if (outbox_depth == 0) {
        throw ConfigError("room.outbox_depth must be at least 1");
    }
}

Clock::duration RoomConfig::tick_interval() const {
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / tick_rate));
}

Room::Room(std::string room_id, RoomConfig cfg, Clock::time_point epoch,
           std::shared_ptr<const kinematics::Skeleton> default_skeleton)
    : id_(std::move(room_id)),
      cfg_(cfg),
      epoch_(epoch),
      default_skeleton_(default_skeleton ? std::move(default_skeleton)
                                         : std::shared_ptr<const kinematics::Skeleton>(
                                               std::shared_ptr<void>(), &kinematics::Skeleton::smpl_default())) {
    cfg_.validate();
}

namespace {

Payload make_payload(const Message& msg) { return std::make_shared<const std::string>(frame_message(encode(msg))); }

double ms_between(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double, std::milli>(to - from).count();
}

} // namespace

std::vector<RosterEntry> Room::roster_locked() const {
    std::vector<RosterEntry> out;
    out.reserve(participants_.size());
    for (const auto& [id, p] : participants_) {
        out.push_back(p.info);
    }
    return out;
}

void Room::broadcast_roster_locked(const std::string& except) {
    const Payload msg = make_payload(RosterMsg{id_, tick_, roster_locked()});
    for (auto& [id, p] : participants_) {
        if (id != except && p.outbox) {
            p.outbox->push_control(msg);
        }
    }
}

const Room::Participant* Room::owner_locked(const std::string& camera_id) const {
    if (camera_id.empty()) {
        return nullptr;
    }
    for (const auto& [id, p] : participants_) {
        if (p.info.camera_id == camera_id) {
            return &p;
        }
    }
    return nullptr;
}

JoinOkMsg Room::join(const std::string& participant_id, const JoinMsg& req, std::shared_ptr<Outbox> outbox) {
    validate(req.avatar);
    auto skeleton = req.avatar.skeleton.empty()
                        ? default_skeleton_
                        : std::make_shared<const kinematics::Skeleton>(kinematics::parse_skeleton(req.avatar.skeleton));

    std::lock_guard lock(mu_);
    if (participants_.count(participant_id)) {
        throw RejectedInput("participant '" + participant_id + "' already joined");
    }
    if (owner_locked(req.camera_id)) {
        throw RejectedInput("camera '" + req.camera_id + "' is already attached in room '" + id_ + "'");
    }
    Participant p;
    p.info = {participant_id, req.display_name, req.avatar.avatar_id, req.avatar.color, req.camera_id};
    p.skeleton = std::move(skeleton);
    p.outbox = std::move(outbox);
    auto& inserted = participants_.emplace(participant_id, std::move(p)).first->second;

    JoinOkMsg reply{participant_id, id_, tick_, roster_locked()};
    if (inserted.outbox) {
        inserted.outbox->push_control(make_payload(reply));
    }
    broadcast_roster_locked(participant_id);
    return reply;
}

bool Room::leave(const std::string& participant_id) {
    std::lock_guard lock(mu_);
    const auto it = participants_.find(participant_id);
    if (it == participants_.end()) {
        return false;
    }
    const std::string camera = it->second.info.camera_id;
    participants_.erase(it);
    std::erase_if(latest_, [&](const auto& kv) { return kv.first.first == camera; });
    broadcast_roster_locked({});
    return true;
}

IngestAck Room::ingest(const std::string& camera_id, std::span<const std::pair<TrackId, MotionFrame>> frames,
                       Clock::time_point now, std::optional<Clock::time_point> detected_at) {
    std::lock_guard lock(mu_);
    if (!owner_locked(camera_id)) {
        ingest_dropped_ += frames.size();
        return {0, ingest_dropped_};
    }
    for (const auto& [track, frame] : frames) {
        latest_.insert_or_assign(Key{camera_id, track}, Entry{frame, now, detected_at.value_or(now), true});
    }
    return {frames.size(), ingest_dropped_};
}

TickReport Room::tick(Clock::time_point now) {
    std::lock_guard lock(mu_);
    TickReport report;
    report.tick = ++tick_;

    FrameBatchMsg batch;
    batch.room_id = id_;
    batch.tick = tick_;
    batch.server_timestamp = std::chrono::duration<double>(now - epoch_).count();

    for (auto it = latest_.begin(); it != latest_.end();) {
        const double staleness = ms_between(it->second.received, now);
        if (staleness > cfg_.stale_evict_ms) {
            it = latest_.erase(it);
            ++report.evicted;
            continue;
        }
        const Participant* owner = owner_locked(it->first.first);
        Entry& e = it->second;
        const kinematics::SkeletonPose pose = kinematics::forward_kinematics(*owner->skeleton, e.frame);

        BatchEntry out;
        out.participant_id = owner->info.participant_id;
        out.person_index = it->first.second;
        out.camera_id = it->first.first;
        out.timestamp = e.frame.timestamp;
        out.staleness_ms = staleness;
        for (int c = 0; c < 3; ++c) {
            out.translation[c] = static_cast<float>(e.frame.translation[c]);
            out.global_orient[c] = static_cast<float>(e.frame.global_orient[c]);
        }
        for (std::size_t j = 0; j < kBodyJointCount; ++j) {
            for (int c = 0; c < 3; ++c) {
                out.body_pose[3 * j + c] = static_cast<float>(e.frame.body_pose[j][c]);
            }
        }
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (int c = 0; c < 3; ++c) {
                out.joints[3 * j + c] = static_cast<float>(pose.joint_positions[j][c]);
            }
        }
        batch.entries.push_back(std::move(out));
        if (e.fresh) {
            report.fresh.push_back({it->first.first, ms_between(e.detected, now), staleness});
            e.fresh = false;
        }
        ++it;
    }
    std::sort(batch.entries.begin(), batch.entries.end(), [](const BatchEntry& a, const BatchEntry& b) {
        return std::tie(a.participant_id, a.person_index) < std::tie(b.participant_id, b.person_index);
    });
    report.entries = batch.entries.size();
    if (batch.entries.empty()) {
        return report;
    }

    report.payload = make_payload(batch);
    for (auto& [id, p] : participants_) {
        if (!p.outbox) {
            continue;
        }
        ++report.recipients;
        if (p.outbox->push_batch(report.payload)) {
            ++report.queue_drops;
        }
    }
    ++batches_sent_;
    queue_drops_ += static_cast<std::int64_t>(report.queue_drops);
    return report;
}

std::int64_t Room::current_tick() const {
    std::lock_guard lock(mu_);
    return tick_;
}

std::vector<RosterEntry> Room::roster() const {
    std::lock_guard lock(mu_);
    return roster_locked();
}

std::size_t Room::participant_count() const {
    std::lock_guard lock(mu_);
    return participants_.size();
}

std::size_t Room::entry_count() const {
    std::lock_guard lock(mu_);
    return latest_.size();
}

std::size_t Room::ingest_dropped() const {
    std::lock_guard lock(mu_);
    return ingest_dropped_;
}

std::int64_t Room::batches_sent() const {
    std::lock_guard lock(mu_);
    return batches_sent_;
}

std::int64_t Room::queue_drops() const {
    std::lock_guard lock(mu_);
    return queue_drops_;
}

bool Room::consistent() const {
    std::lock_guard lock(mu_);
    for (const auto& [key, entry] : latest_) {
        if (!owner_locked(key.first)) {
            return false;
        }
    }
    return true;
}

} // namespace mocap::room
