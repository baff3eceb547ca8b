#pragma once

#include "mocap/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Client/server wire protocol. Every message is one frame: a 4-byte
// big-endian payload length followed by a flat JSON record whose "tag" key
// names the message type. Field-level layout is documented in docs/protocol.md.
namespace mocap::room {

inline constexpr std::size_t kFrameHeaderBytes = 4;
inline constexpr std::size_t kMaxPayloadBytes = 16u << 20;

/// Prefixes `payload` with its big-endian length.
std::string frame_message(std::string_view payload);

/// Incremental frame splitter for a byte stream.
class FrameDecoder {
public:
    void feed(const char* data, std::size_t n);
    /// Next complete payload, if any. Throws ParseError when a length header
    /// exceeds kMaxPayloadBytes; the stream is unusable afterwards.
    std::optional<std::string> next();
    std::size_t buffered() const { return buf_.size() - pos_; }

private:
    std::string buf_;
    std::size_t pos_ = 0;
};

struct AvatarDescriptor {
    std::string avatar_id = "default";
    std::string color = "#808080";  // #rrggbb
    /// Inline skeleton file contents; empty means the server default skeleton.
    std::string skeleton;
    friend bool operator==(const AvatarDescriptor&, const AvatarDescriptor&) = default;
};

/// Throws RejectedInput with the reason when the color is malformed or the
/// skeleton text fails to parse as a valid 24-joint tree.
void validate(const AvatarDescriptor& avatar);

struct RosterEntry {
    std::string participant_id;
    std::string display_name;
    std::string avatar_id;
    std::string color;
    std::string camera_id;
    friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct JoinMsg {
    std::string room_id;
    std::string display_name;
    AvatarDescriptor avatar;
    std::string camera_id;
    friend bool operator==(const JoinMsg&, const JoinMsg&) = default;
};

struct JoinOkMsg {
    std::string participant_id;
    std::string room_id;
    std::int64_t tick = 0;
    std::vector<RosterEntry> roster;
    friend bool operator==(const JoinOkMsg&, const JoinOkMsg&) = default;
};

struct JoinErrMsg {
    std::string reason;
    friend bool operator==(const JoinErrMsg&, const JoinErrMsg&) = default;
};

struct RosterMsg {
    std::string room_id;
    std::int64_t tick = 0;
    std::vector<RosterEntry> roster;
    friend bool operator==(const RosterMsg&, const RosterMsg&) = default;
};

/// Raw detections of one camera frame from a remote source. The server runs
/// them through that camera's tracking pipeline.
struct IngestMsg {
    DetectionFrame frame;
    friend bool operator==(const IngestMsg&, const IngestMsg&) = default;
};

struct BatchEntry {
    std::string participant_id;
    TrackId person_index = 0;
    std::string camera_id;
    double timestamp = 0.0;  // source timestamp of the motion sample
    double staleness_ms = 0.0;
    std::array<float, 3> translation{};
    std::array<float, 3> global_orient{};
    std::array<float, kPoseChannelCount> body_pose{};
    std::array<float, 3 * kJointCount> joints{};  // x,y,z per joint
    friend bool operator==(const BatchEntry&, const BatchEntry&) = default;
};

struct FrameBatchMsg {
    std::string room_id;
    std::int64_t tick = 0;
    double server_timestamp = 0.0;  // seconds on the server's monotonic clock
    std::vector<BatchEntry> entries;  // sorted by (participant_id, person_index)
    friend bool operator==(const FrameBatchMsg&, const FrameBatchMsg&) = default;
};

struct PingMsg {
    std::int64_t seq = 0;
    double sent = 0.0;  // sender's clock, echoed untouched
    friend bool operator==(const PingMsg&, const PingMsg&) = default;
};

struct PongMsg {
    std::int64_t seq = 0;
    double sent = 0.0;
    friend bool operator==(const PongMsg&, const PongMsg&) = default;
};

struct LeaveMsg {
    friend bool operator==(const LeaveMsg&, const LeaveMsg&) = default;
};

using Message = std::variant<JoinMsg, JoinOkMsg, JoinErrMsg, RosterMsg, IngestMsg, FrameBatchMsg, PingMsg, PongMsg,
                             LeaveMsg>;

const char* tag_of(const Message& msg);

/// Payload (without the length prefix). Deterministic: equal messages give
/// identical bytes.
std::string encode(const Message& msg);
/// Throws ParseError on unknown tags or missing/mistyped fields.
Message decode(std::string_view payload);

} // namespace mocap::room
