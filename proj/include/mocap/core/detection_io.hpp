#pragma once

#include "mocap/core/types.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mocap {

/// Serializes a detection as one replay-format line (no trailing newline).
std::string to_record(const Detection& det);

/// Parses one replay-format line. Unknown keys are ignored; field order is
/// free. Throws ParseError on missing/mistyped fields or wrong array lengths.
Detection parse_detection_record(std::string_view line);

/// Streams detections out of a replay file, skipping comments and blank
/// lines; malformed lines are skipped and counted.
class DetectionFileReader {
public:
    /// Throws ParseError if the file cannot be opened.
    explicit DetectionFileReader(const std::filesystem::path& path);

    std::optional<Detection> next();

    std::size_t malformed_lines() const { return malformed_; }
    std::size_t line_number() const { return line_no_; }

private:
    std::ifstream in_;
    std::size_t malformed_ = 0;
    std::size_t line_no_ = 0;
};

/// Reads a whole replay file and groups consecutive detections sharing
/// (camera_id, frame_index) into frames.
struct ReplayContents {
    std::vector<DetectionFrame> frames;
    std::size_t detections = 0;
    std::size_t malformed_lines = 0;
};
ReplayContents read_replay_file(const std::filesystem::path& path);

/// Appends detections in replay format. Opens with a '#' header comment.
class DetectionFileWriter {
public:
    /// Throws ParseError if the file cannot be created.
    explicit DetectionFileWriter(const std::filesystem::path& path);

    void write(const Detection& det);
    void write(const DetectionFrame& frame);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

} // namespace mocap
