#pragma once

#include "mocap/core/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mocap::sources {

enum class PathKind { Linear, Circular };

/// Parametric root trajectory in camera space (meters, seconds).
/// Linear: origin + velocity * t. Circular: origin is the center, motion in
/// the x-z plane with the given radius and angular speed, starting at phase.
struct PersonPath {
    PathKind kind = PathKind::Linear;
    Vec3 origin = Vec3(0.0, 0.0, 3.0);
    Vec3 velocity = Vec3::Zero();
    double radius = 0.0;
    double angular_speed = 0.0;  // rad/s
    double phase = 0.0;          // rad; also offsets the gait cycle

    Vec3 position(double t) const;
};

struct GaitParams {
    double amplitude = 0.4;  // rad
    double frequency = 1.0;  // Hz
};

struct ConfidenceModel {
    double mean = 0.9;
    double sigma = 0.05;
};

struct ScenarioSpec {
    std::string camera_id = "cam0";
    double duration = 10.0;  // s
    double rate = 30.0;      // Hz
    std::vector<PersonPath> paths;  // one per person
    GaitParams gait;
    double noise_sigma_trans = 0.0;  // m
    double noise_sigma_pose = 0.0;   // rad
    double dropout_prob = 0.0;
    ConfidenceModel confidence;
    std::uint64_t seed = 1;

    std::size_t person_count() const { return paths.size(); }
    std::int64_t frame_count() const;

    /// Throws ConfigError.
    void validate() const;
};

struct GroundTruthFrame {
    std::int64_t frame_index = 0;
    double timestamp = 0.0;
    /// (true person index, noiseless detection), including dropped persons.
    std::vector<std::pair<int, Detection>> persons;
};

/// Frame-by-frame producer; identical specs yield identical streams.
class ScenarioGenerator {
public:
    explicit ScenarioGenerator(ScenarioSpec spec);

    /// Next (noisy frame, ground truth), or nullopt once duration is exhausted.
    std::optional<std::pair<DetectionFrame, GroundTruthFrame>> next();

    const ScenarioSpec& spec() const { return spec_; }

private:
    ScenarioSpec spec_;
    std::mt19937_64 rng_;
    std::int64_t frame_ = 0;
};

struct GeneratedScenario {
    std::vector<DetectionFrame> frames;
    std::vector<GroundTruthFrame> truth;
};

GeneratedScenario generate(const ScenarioSpec& spec);

/// Noise-free pose for a person at time t: canonical axis-angle (angle <= pi)
/// orientation facing the camera with a slow yaw sway, plus the gait sinusoid
/// on shoulders, elbows, hips and knees.
void ideal_pose(const ScenarioSpec& spec, std::size_t person, double t, Vec3& global_orient, BodyPose& body_pose);

/// Rewrites an axis-angle vector with angle > pi as its equivalent with angle < pi.
Vec3 canonical_axis_angle(const Vec3& r);

// Preset scenarios.

/// N walkers in parallel lanes, 3 m apart laterally, moving along y.
ScenarioSpec walkers_scenario(int persons, double duration, double rate, std::uint64_t seed);

/// Two people whose image paths cross while their depths differ by depth_gap meters.
ScenarioSpec crossing_scenario(double depth_gap, double duration, double rate, std::uint64_t seed);

/// One person circling at 30 Hz for 20 s with 0.05 rad pose noise and 2 cm translation noise.
ScenarioSpec default_noisy_scenario(std::uint64_t seed = 7);

/// `persons` people spread over the frame on mixed linear/circular paths,
/// with mild noise; used by the serve/bench sources.
ScenarioSpec mixed_scenario(const std::string& camera_id, int persons, double duration, double rate,
                            std::uint64_t seed);

} // namespace mocap::sources
