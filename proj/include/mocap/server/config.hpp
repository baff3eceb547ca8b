#pragma once

#include "mocap/core/camera.hpp"
#include "mocap/room/room.hpp"
#include "mocap/smoothing/smoothing_bank.hpp"
#include "mocap/sources/scenario.hpp"
#include "mocap/tracker/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mocap::server {

enum class SourceKind { Synth, Replay };

/// One in-process motion source: a synthetic scenario or a replay file,
/// attached to a room as a headless participant.
struct SourceSpec {
    std::string name;
    SourceKind kind = SourceKind::Synth;
    std::string room = "lobby";
    std::string camera_id = "cam0";
    // synth
    std::string scenario = "mixed";  // walkers | crossing | noisy | mixed
    int persons = 2;
    double duration = 60.0;
    double rate = 30.0;
    std::uint64_t seed = 1;
    double depth_gap = 1.5;  // crossing only
    /// Negative means "use the preset's value".
    double noise_trans = -1.0;
    double noise_pose = -1.0;
    double dropout = -1.0;
    // replay
    std::string file;
    double speed = 1.0;

    /// Throws ConfigError naming `source.<name>.<key>`.
    void validate() const;
    /// Scenario spec for a synth source, with overrides applied.
    sources::ScenarioSpec scenario_spec() const;
    friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 7878;
    int metrics_port = 0;            // 0 disables the HTTP metrics endpoint
    double metrics_interval_s = 0.0;  // 0 disables periodic export to stderr
    std::string skeleton;            // optional default skeleton file
    room::RoomConfig room;
    tracking::TrackerConfig tracker;
    smoothing::SmoothingParams smoothing;
    CameraIntrinsics camera;
    std::vector<SourceSpec> sources;

    /// Validates every section; throws ConfigError with a field-specific message.
    void validate() const;
    friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

/// INI-style key/value text: sections [server], [room], [tracker],
/// [smoothing], [camera] and one [source.NAME] per source. Unknown sections
/// or keys are errors. `overrides` are "section.key=value" strings applied
/// on top of the text. The result is validated.
ServerConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
ServerConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Effective config as text that parse_config maps back to an equal config.
std::string to_text(const ServerConfig& cfg);

/// Standalone source spec file: the keys of one [source.NAME] section, either
/// at top level or inside a single section.
SourceSpec parse_source_spec(std::string_view text, const std::string& name);
SourceSpec load_source_spec(const std::filesystem::path& path);

const char* to_string(SourceKind kind);

} // namespace mocap::server
