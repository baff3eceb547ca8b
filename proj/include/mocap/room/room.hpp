#pragma once

#include "mocap/core/types.hpp"
#include "mocap/kinematics/skeleton.hpp"
#include "mocap/room/outbox.hpp"
#include "mocap/room/protocol.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace mocap::room {

using Clock = std::chrono::steady_clock;

struct RoomConfig {
    double tick_rate = 30.0;  // Hz
    double stale_evict_ms = 1000.0;
    std::size_t outbox_depth = 8;  // frame batches per participant

    /// Throws ConfigError naming the offending field.
    void validate() const;
    Clock::duration tick_interval() const;
    friend bool operator==(const RoomConfig&, const RoomConfig&) = default;
};

struct IngestAck {
    std::size_t accepted = 0;
    std::size_t dropped_total = 0;  // frames dropped for unknown cameras, room lifetime
};

/// Timing of one entry broadcast for the first time.
struct FreshEntry {
    std::string camera_id;
    double since_detected_ms = 0.0;  // detection receipt to enqueue
    double since_ingest_ms = 0.0;    // room ingest to enqueue
};

struct TickReport {
    std::int64_t tick = 0;
    std::size_t entries = 0;
    std::size_t evicted = 0;
    std::size_t recipients = 0;
    std::size_t queue_drops = 0;
    /// Framed FRAME_BATCH shared by every recipient; null when the batch was empty.
    Payload payload;
    /// One record per entry ingested since the previous tick.
    std::vector<FreshEntry> fresh;
};

/// One chat room: roster, latest motion sample per tracked person, and
/// tick-synchronized fan-out. Every public method takes the room lock, so
/// join/leave/ingest/tick for one room are applied one at a time.
class Room {
public:
    /// `epoch` is the zero of server_timestamp in every batch. Participants
    /// without an uploaded skeleton use `default_skeleton` (SMPL if null).
    Room(std::string room_id, RoomConfig cfg, Clock::time_point epoch,
         std::shared_ptr<const kinematics::Skeleton> default_skeleton = nullptr);

    /// Adds a participant and queues JOIN_OK on its outbox (if any), ahead of
    /// any batch; existing participants get a ROSTER. Throws RejectedInput
    /// for an invalid avatar or a camera already attached here.
    JoinOkMsg join(const std::string& participant_id, const JoinMsg& req, std::shared_ptr<Outbox> outbox);

    /// Removes the participant and its camera's entries. Remaining
    /// participants get a ROSTER. Returns false if it was not a member.
    bool leave(const std::string& participant_id);

    /// Latest-wins update keyed by (camera_id, track id). Frames for a camera
    /// no participant owns are dropped and counted. `detected_at` is when the
    /// underlying detection reached the server (defaults to `now`).
    IngestAck ingest(const std::string& camera_id, std::span<const std::pair<TrackId, MotionFrame>> frames,
                     Clock::time_point now, std::optional<Clock::time_point> detected_at = std::nullopt);

    /// Evicts stale entries, runs FK on the rest, and enqueues one FRAME_BATCH
    /// payload to every participant. The tick advances even when the batch
    /// is empty (empty batches are not sent).
    TickReport tick(Clock::time_point now);

    const std::string& id() const { return id_; }
    const RoomConfig& config() const { return cfg_; }
    std::int64_t current_tick() const;
    std::vector<RosterEntry> roster() const;
    std::size_t participant_count() const;
    std::size_t entry_count() const;
    std::size_t ingest_dropped() const;
    std::int64_t batches_sent() const;
    std::int64_t queue_drops() const;
    /// True when every latest-map key belongs to a current participant's camera.
    bool consistent() const;

private:
    struct Participant {
        RosterEntry info;
        std::shared_ptr<const kinematics::Skeleton> skeleton;
        std::shared_ptr<Outbox> outbox;
    };
    struct Entry {
        MotionFrame frame;
        Clock::time_point received;
        Clock::time_point detected;
        bool fresh = true;
    };
    using Key = std::pair<std::string, TrackId>;

    std::vector<RosterEntry> roster_locked() const;
    void broadcast_roster_locked(const std::string& except);
    const Participant* owner_locked(const std::string& camera_id) const;

    const std::string id_;
    const RoomConfig cfg_;
    const Clock::time_point epoch_;
    const std::shared_ptr<const kinematics::Skeleton> default_skeleton_;
    mutable std::mutex mu_;
    std::map<std::string, Participant> participants_;  // ordered by id
    std::map<Key, Entry> latest_;
    std::int64_t tick_ = 0;  // last tick emitted
    std::size_t ingest_dropped_ = 0;
    std::int64_t batches_sent_ = 0;
    std::int64_t queue_drops_ = 0;
};

} // namespace mocap::room
