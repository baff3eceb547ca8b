#pragma once

#include "mocap/core/types.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

namespace mocap::sources {

struct ReplayStats {
    std::size_t frames = 0;
    std::size_t detections = 0;
    std::size_t malformed_lines = 0;
    std::size_t gap_frames = 0;  // empty frames synthesized for frame_index gaps
};

/// Loads a replay file into frames. The line format has no marker for frames
/// in which nobody was detected, so gaps in a camera's frame_index sequence
/// are refilled with empty frames at linearly interpolated timestamps.
/// Throws ParseError if the file cannot be read.
std::vector<DetectionFrame> load_replay(const std::filesystem::path& path, ReplayStats* stats = nullptr);

/// Delivers frames in file order. speed > 0 paces delivery by recorded
/// timestamp gaps divided by speed; speed == 0 delivers immediately. The
/// sink returns false to stop early.
ReplayStats replay(const std::filesystem::path& path, double speed,
                   const std::function<bool(const DetectionFrame&)>& sink);

/// Pacing loop shared with other sources.
void deliver_paced(const std::vector<DetectionFrame>& frames, double speed,
                   const std::function<bool(const DetectionFrame&)>& sink);

} // namespace mocap::sources
