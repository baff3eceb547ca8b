#include "mocap/room/protocol.hpp"

#include "mocap/core/detection_io.hpp"
#include "mocap/core/error.hpp"
#include "mocap/core/json_util.hpp"
#include "mocap/core/record.hpp"
#include "mocap/kinematics/skeleton.hpp"

#include <cctype>

namespace mocap::room {

using json_util::Json;

std::string frame_message(std::string_view payload) {
    if (payload.size() > kMaxPayloadBytes) {
        throw std::length_error("payload exceeds frame limit");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::string out;
    out.reserve(kFrameHeaderBytes + payload.size());
    out.push_back(static_cast<char>((n >> 24) & 0xFF));
    out.push_back(static_cast<char>((n >> 16) & 0xFF));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
    out.append(payload);
    return out;
}

void FrameDecoder::feed(const char* data, std::size_t n) {
    if (pos_ > 0 && pos_ >= buf_.size() / 2) {
        buf_.erase(0, pos_);
        pos_ = 0;
    }
    buf_.append(data, n);
}

std::optional<std::string> FrameDecoder::next() {
    if (buffered() < kFrameHeaderBytes) {
        return std::nullopt;
    }
    const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
    const std::size_t n = (std::size_t{p[0]} << 24) | (std::size_t{p[1]} << 16) | (std::size_t{p[2]} << 8) | p[3];
    if (n > kMaxPayloadBytes) {
        throw ParseError("frame length " + std::to_string(n) + " exceeds limit");
    }
    if (buffered() < kFrameHeaderBytes + n) {
        return std::nullopt;
    }
    std::string payload = buf_.substr(pos_ + kFrameHeaderBytes, n);
    pos_ += kFrameHeaderBytes + n;
    return payload;
}

void validate(const AvatarDescriptor& avatar) {
    if (avatar.avatar_id.empty()) {
        throw RejectedInput("avatar: avatar_id must not be empty");
    }
    const std::string& c = avatar.color;
    bool color_ok = c.size() == 7 && c[0] == '#';
    for (std::size_t i = 1; color_ok && i < c.size(); ++i) {
        color_ok = std::isxdigit(static_cast<unsigned char>(c[i])) != 0;
    }
    if (!color_ok) {
        throw RejectedInput("avatar: color must be #rrggbb, got '" + c + "'");
    }
    if (!avatar.skeleton.empty()) {
        try {
            kinematics::parse_skeleton(avatar.skeleton);
        } catch (const ParseError& e) {
            throw RejectedInput(std::string("avatar: invalid skeleton: ") + e.what());
        }
    }
}

namespace {

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

std::string roster_json(const std::vector<RosterEntry>& roster) {
    std::string out = "[";
    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (i) out.push_back(',');
        const RosterEntry& r = roster[i];
        out += RecordWriter()
                   .field("participant_id", r.participant_id)
                   .field("display_name", r.display_name)
                   .field("avatar_id", r.avatar_id)
                   .field("color", r.color)
                   .field("camera_id", r.camera_id)
                   .str();
    }
    out.push_back(']');
    return out;
}

std::string entries_json(const std::vector<BatchEntry>& entries) {
    std::string out = "[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out.push_back(',');
        const BatchEntry& e = entries[i];
        out += RecordWriter()
                   .field("participant_id", e.participant_id)
                   .field("person_index", static_cast<std::int64_t>(e.person_index))
                   .field("camera_id", e.camera_id)
                   .field("timestamp", e.timestamp)
                   .field("staleness_ms", e.staleness_ms)
                   .array_f32("translation", e.translation)
                   .array_f32("global_orient", e.global_orient)
                   .array_f32("body_pose", e.body_pose)
                   .array_f32("joints", e.joints)
                   .str();
    }
    out.push_back(']');
    return out;
}

const Json& require_array(const Json& obj, const char* key) {
    const Json& v = json_util::require(obj, key);
    if (!v.is_array()) {
        throw ParseError(std::string("key '") + key + "' must be an array");
    }
    return v;
}

template <std::size_t N>
std::array<float, N> get_floats(const Json& obj, const char* key) {
    const Json& v = require_array(obj, key);
    if (v.size() != N) {
        throw ParseError(std::string("key '") + key + "' must hold " + std::to_string(N) + " numbers");
    }
    std::array<float, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!v[i].is_number()) {
            throw ParseError(std::string("key '") + key + "' contains a non-number");
        }
        out[i] = v[i].get<float>();
    }
    return out;
}

std::vector<RosterEntry> parse_roster(const Json& obj) {
    std::vector<RosterEntry> out;
    for (const Json& r : require_array(obj, "roster")) {
        out.push_back({json_util::get_string(r, "participant_id"), json_util::get_string(r, "display_name"),
                       json_util::get_string(r, "avatar_id"), json_util::get_string(r, "color"),
                       json_util::get_string(r, "camera_id")});
    }
    return out;
}

BatchEntry parse_entry(const Json& e) {
    BatchEntry out;
    out.participant_id = json_util::get_string(e, "participant_id");
    out.person_index = json_util::get_int(e, "person_index");
    out.camera_id = json_util::get_string(e, "camera_id");
    out.timestamp = json_util::get_number(e, "timestamp");
    out.staleness_ms = json_util::get_number(e, "staleness_ms");
    out.translation = get_floats<3>(e, "translation");
    out.global_orient = get_floats<3>(e, "global_orient");
    out.body_pose = get_floats<kPoseChannelCount>(e, "body_pose");
    out.joints = get_floats<3 * kJointCount>(e, "joints");
    return out;
}

} // namespace

const char* tag_of(const Message& msg) {
    return std::visit(Overloaded{
                          [](const JoinMsg&) { return "JOIN"; },
                          [](const JoinOkMsg&) { return "JOIN_OK"; },
                          [](const JoinErrMsg&) { return "JOIN_ERR"; },
                          [](const RosterMsg&) { return "ROSTER"; },
                          [](const IngestMsg&) { return "INGEST"; },
                          [](const FrameBatchMsg&) { return "FRAME_BATCH"; },
                          [](const PingMsg&) { return "PING"; },
                          [](const PongMsg&) { return "PONG"; },
                          [](const LeaveMsg&) { return "LEAVE"; },
                      },
                      msg);
}

std::string encode(const Message& msg) {
    RecordWriter w;
    w.field("tag", tag_of(msg));
    std::visit(Overloaded{
                   [&](const JoinMsg& m) {
                       w.field("room_id", m.room_id)
                           .field("display_name", m.display_name)
                           .field("avatar_id", m.avatar.avatar_id)
                           .field("color", m.avatar.color)
                           .field("skeleton", m.avatar.skeleton)
                           .field("camera_id", m.camera_id);
                   },
                   [&](const JoinOkMsg& m) {
                       w.field("participant_id", m.participant_id)
                           .field("room_id", m.room_id)
                           .field("tick", m.tick)
                           .raw("roster", roster_json(m.roster));
                   },
                   [&](const JoinErrMsg& m) { w.field("reason", m.reason); },
                   [&](const RosterMsg& m) {
                       w.field("room_id", m.room_id).field("tick", m.tick).raw("roster", roster_json(m.roster));
                   },
                   [&](const IngestMsg& m) {
                       std::string dets = "[";
                       for (std::size_t i = 0; i < m.frame.detections.size(); ++i) {
                           if (i) dets.push_back(',');
                           dets += to_record(m.frame.detections[i]);
                       }
                       dets.push_back(']');
                       w.field("camera_id", m.frame.camera_id)
                           .field("frame_index", m.frame.frame_index)
                           .field("timestamp", m.frame.timestamp)
                           .raw("detections", dets);
                   },
                   [&](const FrameBatchMsg& m) {
                       w.field("room_id", m.room_id)
                           .field("tick", m.tick)
                           .field("server_timestamp", m.server_timestamp)
                           .raw("entries", entries_json(m.entries));
                   },
                   [&](const PingMsg& m) { w.field("seq", m.seq).field("sent", m.sent); },
                   [&](const PongMsg& m) { w.field("seq", m.seq).field("sent", m.sent); },
                   [&](const LeaveMsg&) {},
               },
               msg);
    return w.str();
}

Message decode(std::string_view payload) {
    const Json obj = json_util::parse_object(payload);
    const std::string tag = json_util::get_string(obj, "tag");
    using namespace json_util;
    if (tag == "JOIN") {
        JoinMsg m;
        m.room_id = get_string(obj, "room_id");
        m.display_name = get_string(obj, "display_name");
        m.avatar.avatar_id = get_string(obj, "avatar_id");
        m.avatar.color = get_string(obj, "color");
        m.avatar.skeleton = obj.contains("skeleton") ? get_string(obj, "skeleton") : std::string();
        m.camera_id = get_string(obj, "camera_id");
        return m;
    }
    if (tag == "JOIN_OK") {
        return JoinOkMsg{get_string(obj, "participant_id"), get_string(obj, "room_id"), get_int(obj, "tick"),
                         parse_roster(obj)};
    }
    if (tag == "JOIN_ERR") {
        return JoinErrMsg{get_string(obj, "reason")};
    }
    if (tag == "ROSTER") {
        return RosterMsg{get_string(obj, "room_id"), get_int(obj, "tick"), parse_roster(obj)};
    }
    if (tag == "INGEST") {
        IngestMsg m;
        m.frame.camera_id = get_string(obj, "camera_id");
        m.frame.frame_index = get_int(obj, "frame_index");
        m.frame.timestamp = get_number(obj, "timestamp");
        for (const Json& d : require_array(obj, "detections")) {
            if (!d.is_object()) {
                throw ParseError("detections must be records");
            }
            m.frame.detections.push_back(detection_from_json(d));
        }
        return m;
    }
    if (tag == "FRAME_BATCH") {
        FrameBatchMsg m;
        m.room_id = get_string(obj, "room_id");
        m.tick = get_int(obj, "tick");
        m.server_timestamp = get_number(obj, "server_timestamp");
        for (const Json& e : require_array(obj, "entries")) {
            m.entries.push_back(parse_entry(e));
        }
        return m;
    }
    if (tag == "PING") {
        return PingMsg{get_int(obj, "seq"), get_number(obj, "sent")};
    }
    if (tag == "PONG") {
        return PongMsg{get_int(obj, "seq"), get_number(obj, "sent")};
    }
    if (tag == "LEAVE") {
        return LeaveMsg{};
    }
    throw ParseError("unknown message tag '" + tag + "'");
}

} // namespace mocap::room
