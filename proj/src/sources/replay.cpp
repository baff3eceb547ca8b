#include "mocap/sources/replay.hpp"

#include "mocap/core/detection_io.hpp"

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

namespace mocap::sources {

std::vector<DetectionFrame> load_replay(const std::filesystem::path& path, ReplayStats* stats) {
    ReplayContents contents = read_replay_file(path);
    ReplayStats local;
    local.detections = contents.detections;
    local.malformed_lines = contents.malformed_lines;

    std::vector<DetectionFrame> out;
    out.reserve(contents.frames.size());
    std::map<std::string, std::size_t> last_of_camera;  // index into out
    for (auto& frame : contents.frames) {
        const auto it = last_of_camera.find(frame.camera_id);
        if (it != last_of_camera.end()) {
            const DetectionFrame& prev = out[it->second];
            const std::int64_t gap = frame.frame_index - prev.frame_index;
            const double t0 = prev.timestamp;
            const double t1 = frame.timestamp;
            for (std::int64_t g = 1; g < gap; ++g) {
                DetectionFrame empty;
                empty.camera_id = frame.camera_id;
                empty.frame_index = prev.frame_index + g;
                empty.timestamp = t0 + (t1 - t0) * static_cast<double>(g) / static_cast<double>(gap);
                out.push_back(std::move(empty));
                ++local.gap_frames;
            }
        }
        last_of_camera[frame.camera_id] = out.size();
        out.push_back(std::move(frame));
    }
    local.frames = out.size();
    if (stats) *stats = local;
    return out;
}

void deliver_paced(const std::vector<DetectionFrame>& frames, double speed,
                   const std::function<bool(const DetectionFrame&)>& sink) {
    if (speed < 0.0) {
        throw std::invalid_argument("replay speed must be >= 0");
    }
    if (frames.empty()) return;
    const auto start = std::chrono::steady_clock::now();
    const double t0 = frames.front().timestamp;
    for (const auto& f : frames) {
        if (speed > 0.0) {
            const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                         std::chrono::duration<double>((f.timestamp - t0) / speed));
            std::this_thread::sleep_until(due);
        }
        if (!sink(f)) return;
    }
}

ReplayStats replay(const std::filesystem::path& path, double speed,
                   const std::function<bool(const DetectionFrame&)>& sink) {
    ReplayStats stats;
    const auto frames = load_replay(path, &stats);
    deliver_paced(frames, speed, sink);
    return stats;
}

} // namespace mocap::sources
