#include "mocap/core/detection_io.hpp"

#include "mocap/core/error.hpp"
#include "mocap/core/json_util.hpp"
#include "mocap/core/record.hpp"

#include <array>

namespace mocap {

namespace {

bool skippable(std::string_view line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string_view::npos || line[pos] == '#';
}

} // namespace

std::string to_record(const Detection& det) {
    std::array<double, kPoseChannelCount> pose{};
    for (std::size_t j = 0; j < kBodyJointCount; ++j) {
        for (int c = 0; c < 3; ++c) {
            pose[3 * j + c] = det.body_pose[j][c];
        }
    }
    RecordWriter w;
    w.field("camera_id", det.camera_id)
        .field("frame_index", det.frame_index)
        .field("timestamp", det.timestamp)
        .field("confidence", det.confidence)
        .array("global_orient", std::span<const double>(det.global_orient.data(), 3))
        .array("body_pose", pose)
        .array("translation", std::span<const double>(det.translation.data(), 3));
    return w.str();
}

Detection parse_detection_record(std::string_view line) {
    return json_util::detection_from_json(json_util::parse_object(line));
}

DetectionFileReader::DetectionFileReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) {
        throw ParseError("cannot open replay file " + path.string());
    }
}

std::optional<Detection> DetectionFileReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (skippable(line)) {
            continue;
        }
        try {
            return parse_detection_record(line);
        } catch (const ParseError&) {
            ++malformed_;
        }
    }
    return std::nullopt;
}

ReplayContents read_replay_file(const std::filesystem::path& path) {
    DetectionFileReader reader(path);
    ReplayContents out;
    while (auto det = reader.next()) {
        ++out.detections;
        if (out.frames.empty() || out.frames.back().camera_id != det->camera_id ||
            out.frames.back().frame_index != det->frame_index) {
            DetectionFrame f;
            f.camera_id = det->camera_id;
            f.frame_index = det->frame_index;
            f.timestamp = det->timestamp;
            out.frames.push_back(std::move(f));
        }
        out.frames.back().detections.push_back(std::move(*det));
    }
    out.malformed_lines = reader.malformed_lines();
    return out;
}

DetectionFileWriter::DetectionFileWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) {
        throw ParseError("cannot write replay file " + path.string());
    }
    out_ << "# detection replay v1: one detection per line\n";
    out_.flush();
}

void DetectionFileWriter::write(const Detection& det) { out_ << to_record(det) << '\n'; }

void DetectionFileWriter::write(const DetectionFrame& frame) {
    for (const auto& d : frame.detections) {
        write(d);
    }
}

} // namespace mocap
