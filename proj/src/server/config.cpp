#include "mocap/server/config.hpp"

#include "mocap/core/error.hpp"
#include "mocap/core/record.hpp"
#include "mocap/kinematics/skeleton.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <type_traits>
#include <sstream>

namespace mocap::server {

namespace pt = boost::property_tree;

const char* to_string(SourceKind kind) { return kind == SourceKind::Synth ? "synth" : "replay"; }

namespace {

// One config key bound to a field: parse from text and print back.
struct Binding {
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

std::string fmt(double v) {
    std::string out;
    append_number(out, v);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
    Int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
}

Binding bind_key(std::string key, double& field) {
    return {std::move(key), [&field](const std::string& s) { field = parse_double(s); },
            [&field] { return fmt(field); }};
}

template <typename Int>
    requires std::is_integral_v<Int>
Binding bind_key(std::string key, Int& field) {
    return {std::move(key), [&field](const std::string& s) { field = parse_int<Int>(s); },
            [&field] { return std::to_string(field); }};
}

Binding bind_key(std::string key, std::string& field) {
    return {std::move(key), [&field](const std::string& s) { field = s; }, [&field] { return field; }};
}

Binding bind_kind(SourceKind& field) {
    return {"kind",
            [&field](const std::string& s) {
                if (s == "synth") {
                    field = SourceKind::Synth;
                } else if (s == "replay") {
                    field = SourceKind::Replay;
                } else {
                    throw std::invalid_argument("expected synth or replay, got '" + s + "'");
                }
            },
            [&field] { return std::string(to_string(field)); }};
}

void bind_one_euro(std::vector<Binding>& out, const std::string& prefix, smoothing::OneEuroParams& p) {
    out.push_back(bind_key(prefix + "_min_cutoff", p.min_cutoff));
    out.push_back(bind_key(prefix + "_beta", p.beta));
    out.push_back(bind_key(prefix + "_d_cutoff", p.d_cutoff));
}

std::vector<Binding> server_bindings(ServerConfig& c) {
    return {bind_key("host", c.host), bind_key("port", c.port), bind_key("metrics_port", c.metrics_port),
            bind_key("metrics_interval_s", c.metrics_interval_s), bind_key("skeleton", c.skeleton)};
}

std::vector<Binding> room_bindings(room::RoomConfig& r) {
    return {bind_key("tick_rate", r.tick_rate), bind_key("stale_evict_ms", r.stale_evict_ms),
            bind_key("outbox_depth", r.outbox_depth)};
}

std::vector<Binding> tracker_bindings(tracking::TrackerConfig& t) {
    return {bind_key("tau_high", t.tau_high),   bind_key("tau_low", t.tau_low),         bind_key("gate", t.gate),
            bind_key("max_misses", t.max_misses), bind_key("min_hits", t.min_hits),     bind_key("lambda_s", t.lambda_s),
            bind_key("s_min", t.s_min),         bind_key("process_noise", t.process_noise), bind_key("obs_noise", t.obs_noise)};
}

std::vector<Binding> smoothing_bindings(smoothing::SmoothingParams& s) {
    std::vector<Binding> out;
    bind_one_euro(out, "orient", s.orient);
    bind_one_euro(out, "pose", s.pose);
    bind_one_euro(out, "trans", s.trans);
    return out;
}

std::vector<Binding> camera_bindings(CameraIntrinsics& k) {
    return {bind_key("focal_px", k.focal_px), bind_key("cx", k.cx), bind_key("cy", k.cy), bind_key("width", k.width),
            bind_key("height", k.height)};
}

std::vector<Binding> source_bindings(SourceSpec& s) {
    return {bind_kind(s.kind),          bind_key("room", s.room),
            bind_key("camera_id", s.camera_id), bind_key("scenario", s.scenario),
            bind_key("persons", s.persons),     bind_key("duration", s.duration),
            bind_key("rate", s.rate),           bind_key("seed", s.seed),
            bind_key("depth_gap", s.depth_gap), bind_key("noise_trans", s.noise_trans),
            bind_key("noise_pose", s.noise_pose), bind_key("dropout", s.dropout),
            bind_key("file", s.file),           bind_key("speed", s.speed)};
}

void apply(const pt::ptree& section, std::vector<Binding> bindings, const std::string& section_name) {
    for (const auto& [key, node] : section) {
        if (!node.empty()) {
            throw ConfigError(section_name + "." + key + ": nested keys are not supported");
        }
        const auto it =
            std::find_if(bindings.begin(), bindings.end(), [&](const Binding& b) { return b.key == key; });
        if (it == bindings.end()) {
            throw ConfigError("unknown config key " + section_name + "." + key);
        }
        try {
            it->set(node.data());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(section_name + "." + key + ": " + e.what());
        }
    }
}

void emit(std::ostringstream& out, const std::string& section, const std::vector<Binding>& bindings) {
    out << "[" << section << "]\n";
    for (const Binding& b : bindings) {
        out << b.key << " = " << b.get() << "\n";
    }
    out << "\n";
}

pt::ptree read_ini(std::string_view text) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    return tree;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void SourceSpec::validate() const {
    const std::string p = "source." + name + ".";
    if (room.empty()) throw ConfigError(p + "room must not be empty");
    if (camera_id.empty()) throw ConfigError(p + "camera_id must not be empty");
    if (kind == SourceKind::Replay) {
        if (file.empty()) throw ConfigError(p + "file is required for replay sources");
        if (!(speed >= 0.0) || !std::isfinite(speed)) throw ConfigError(p + "speed must be >= 0");
        return;
    }
    static const std::set<std::string> kScenarios{"walkers", "crossing", "noisy", "mixed"};
    if (!kScenarios.count(scenario)) {
        throw ConfigError(p + "scenario must be one of walkers, crossing, noisy, mixed");
    }
    if (persons < 1) throw ConfigError(p + "persons must be >= 1");
    if (!(duration > 0.0)) throw ConfigError(p + "duration must be positive");
    if (!(rate > 0.0)) throw ConfigError(p + "rate must be positive");
    if (dropout > 1.0) throw ConfigError(p + "dropout must be <= 1");
    try {
        scenario_spec().validate();
    } catch (const ConfigError& e) {
        throw ConfigError(p + e.what());
    }
}

sources::ScenarioSpec SourceSpec::scenario_spec() const {
    sources::ScenarioSpec spec;
    if (scenario == "walkers") {
        spec = sources::walkers_scenario(persons, duration, rate, seed);
    } else if (scenario == "crossing") {
        spec = sources::crossing_scenario(depth_gap, duration, rate, seed);
    } else if (scenario == "noisy") {
        spec = sources::default_noisy_scenario(seed);
        spec.duration = duration;
        spec.rate = rate;
    } else {
        spec = sources::mixed_scenario(camera_id, persons, duration, rate, seed);
    }
    spec.camera_id = camera_id;
    if (noise_trans >= 0.0) spec.noise_sigma_trans = noise_trans;
    if (noise_pose >= 0.0) spec.noise_sigma_pose = noise_pose;
    if (dropout >= 0.0) spec.dropout_prob = dropout;
    return spec;
}

void ServerConfig::validate() const {
    if (host.empty()) throw ConfigError("server.host must not be empty");
    if (port < 0 || port > 65535) throw ConfigError("server.port must be in [0, 65535]");
    if (metrics_port < 0 || metrics_port > 65535) throw ConfigError("server.metrics_port must be in [0, 65535]");
    if (!(metrics_interval_s >= 0.0)) throw ConfigError("server.metrics_interval_s must be >= 0");
    if (!skeleton.empty()) {
        try {
            kinematics::load_skeleton(skeleton);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("server.skeleton: ") + e.what());
        }
    }
    room.validate();
    tracker.validate();
    try {
        smoothing.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("smoothing.") + e.what());
    }
    try {
        camera.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("camera.") + e.what());
    }
    std::set<std::string> names;
    std::set<std::pair<std::string, std::string>> cameras;
    for (const SourceSpec& s : sources) {
        s.validate();
        if (!names.insert(s.name).second) throw ConfigError("duplicate source section source." + s.name);
        if (!cameras.insert({s.room, s.camera_id}).second) {
            throw ConfigError("source." + s.name + ".camera_id: camera '" + s.camera_id +
                              "' is already used in room '" + s.room + "'");
        }
    }
}

ServerConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    pt::ptree tree = read_ini(text);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        const auto dot = o.rfind('.', eq);
        if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 == eq) {
            throw ConfigError("override '" + o + "' must look like section.key=value");
        }
        const std::string section = o.substr(0, dot);
        const std::string key = o.substr(dot + 1, eq - dot - 1);
        auto it = tree.find(section);
        pt::ptree& body = it == tree.not_found() ? tree.push_back({section, pt::ptree()})->second : it->second;
        body.put(pt::ptree::path_type(key, '\0'), o.substr(eq + 1));
    }
    ServerConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("key '" + section + "' must be inside a section");
        }
        if (section == "server") {
            apply(body, server_bindings(cfg), section);
        } else if (section == "room") {
            apply(body, room_bindings(cfg.room), section);
        } else if (section == "tracker") {
            apply(body, tracker_bindings(cfg.tracker), section);
        } else if (section == "smoothing") {
            apply(body, smoothing_bindings(cfg.smoothing), section);
        } else if (section == "camera") {
            apply(body, camera_bindings(cfg.camera), section);
        } else if (section.rfind("source.", 0) == 0 && section.size() > 7) {
            SourceSpec s;
            s.name = section.substr(7);
            apply(body, source_bindings(s), section);
            cfg.sources.push_back(std::move(s));
        } else {
            throw ConfigError("unknown config section [" + section + "]");
        }
    }
    cfg.validate();
    return cfg;
}

ServerConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    return parse_config(read_file(path), overrides);
}

std::string to_text(const ServerConfig& c) {
    ServerConfig copy = c;  // bindings need mutable references
    std::ostringstream out;
    emit(out, "server", server_bindings(copy));
    emit(out, "room", room_bindings(copy.room));
    emit(out, "tracker", tracker_bindings(copy.tracker));
    emit(out, "smoothing", smoothing_bindings(copy.smoothing));
    emit(out, "camera", camera_bindings(copy.camera));
    for (SourceSpec& s : copy.sources) {
        emit(out, "source." + s.name, source_bindings(s));
    }
    return out.str();
}

SourceSpec parse_source_spec(std::string_view text, const std::string& name) {
    const pt::ptree tree = read_ini(text);
    SourceSpec s;
    s.name = name;
    pt::ptree top;
    const pt::ptree* body = &top;
    std::size_t sections = 0;
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            top.put_child(pt::ptree::path_type(key, '\0'), node);
        } else {
            ++sections;
            body = &node;
        }
    }
    if (sections > 1 || (sections == 1 && !top.empty())) {
        throw ConfigError("source spec must hold either top-level keys or exactly one section");
    }
    apply(*body, source_bindings(s), "source." + name);
    s.validate();
    return s;
}

SourceSpec load_source_spec(const std::filesystem::path& path) {
    return parse_source_spec(read_file(path), path.stem().string());
}

} // namespace mocap::server
