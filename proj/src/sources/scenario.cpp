#include "mocap/sources/scenario.hpp"

#include "mocap/core/error.hpp"
#include "mocap/kinematics/rotation.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mocap::sources {

namespace {

constexpr double kPi = std::numbers::pi;

// body_pose slots (SMPL joint index - 1)
constexpr std::size_t kLeftHip = 0;
constexpr std::size_t kRightHip = 1;
constexpr std::size_t kLeftKnee = 3;
constexpr std::size_t kRightKnee = 4;
constexpr std::size_t kLeftShoulder = 15;
constexpr std::size_t kRightShoulder = 16;
constexpr std::size_t kLeftElbow = 17;
constexpr std::size_t kRightElbow = 18;

} // namespace

Vec3 PersonPath::position(double t) const {
    if (kind == PathKind::Linear) {
        return origin + velocity * t;
    }
    const double a = phase + angular_speed * t;
    return origin + Vec3(radius * std::cos(a), 0.0, radius * std::sin(a));
}

std::int64_t ScenarioSpec::frame_count() const {
    return static_cast<std::int64_t>(std::floor(duration * rate + 1e-9));
}

void ScenarioSpec::validate() const {
    if (paths.empty()) throw ConfigError("scenario.persons must be >= 1");
    if (!(duration > 0.0)) throw ConfigError("scenario.duration must be > 0");
    if (!(rate > 0.0)) throw ConfigError("scenario.rate must be > 0");
    if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) throw ConfigError("scenario.dropout_prob must lie in [0,1]");
    if (!(noise_sigma_trans >= 0.0)) throw ConfigError("scenario.noise_sigma_trans must be >= 0");
    if (!(noise_sigma_pose >= 0.0)) throw ConfigError("scenario.noise_sigma_pose must be >= 0");
    if (!(confidence.mean >= 0.0 && confidence.mean <= 1.0)) throw ConfigError("scenario.conf_mean must lie in [0,1]");
    if (!(confidence.sigma >= 0.0)) throw ConfigError("scenario.conf_sigma must be >= 0");
    if (!(gait.frequency >= 0.0)) throw ConfigError("scenario.gait_frequency must be >= 0");
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const PersonPath& p = paths[i];
        const double min_z = p.kind == PathKind::Circular ? p.origin.z() - std::abs(p.radius) : p.origin.z();
        if (!(min_z > 0.0)) {
            throw ConfigError("scenario path " + std::to_string(i) + " starts at or behind the camera");
        }
        if (p.kind == PathKind::Linear) {
            const double end_z = p.position(duration).z();
            if (!(end_z > 0.0)) {
                throw ConfigError("scenario path " + std::to_string(i) + " walks behind the camera");
            }
        }
    }
}

Vec3 canonical_axis_angle(const Vec3& r) {
    const double theta = r.norm();
    if (theta <= kPi) {
        return r;
    }
    // Reduce modulo 2*pi along the same axis, then flip if still above pi.
    double reduced = std::fmod(theta, 2.0 * kPi);
    const Vec3 axis = r / theta;
    if (reduced > kPi) {
        return -axis * (2.0 * kPi - reduced);
    }
    return axis * reduced;
}

void ideal_pose(const ScenarioSpec& spec, std::size_t person, double t, Vec3& global_orient, BodyPose& body_pose) {
    const PersonPath& path = spec.paths[person];
    const double yaw = 0.3 * std::sin(0.4 * t + path.phase);
    const Eigen::Matrix3d facing = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                                    Eigen::AngleAxisd(kPi, Eigen::Vector3d::UnitX()))
                                       .toRotationMatrix();
    global_orient = canonical_axis_angle(kinematics::matrix_to_axis_angle(facing));

    body_pose = Detection::zero_pose();
    const double a = spec.gait.amplitude;
    const double phi = 2.0 * kPi * spec.gait.frequency * t + path.phase;
    const double swing = a * std::sin(phi);
    const double bend = 0.5 * a * (1.0 - std::cos(phi));
    body_pose[kLeftHip] = Vec3(swing, 0.0, 0.0);
    body_pose[kRightHip] = Vec3(-swing, 0.0, 0.0);
    body_pose[kLeftKnee] = Vec3(bend, 0.0, 0.0);
    body_pose[kRightKnee] = Vec3(a - bend, 0.0, 0.0);
    body_pose[kLeftShoulder] = Vec3(-0.8 * swing, 0.0, -1.2);
    body_pose[kRightShoulder] = Vec3(0.8 * swing, 0.0, 1.2);
    body_pose[kLeftElbow] = Vec3(0.0, -bend, 0.0);
    body_pose[kRightElbow] = Vec3(0.0, bend - a, 0.0);
}

ScenarioGenerator::ScenarioGenerator(ScenarioSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.validate();
}

std::optional<std::pair<DetectionFrame, GroundTruthFrame>> ScenarioGenerator::next() {
    if (frame_ >= spec_.frame_count()) {
        return std::nullopt;
    }
    const std::int64_t k = frame_++;
    const double t = static_cast<double>(k) / spec_.rate;

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    DetectionFrame frame;
    frame.camera_id = spec_.camera_id;
    frame.frame_index = k;
    frame.timestamp = t;
    GroundTruthFrame truth;
    truth.frame_index = k;
    truth.timestamp = t;

    for (std::size_t p = 0; p < spec_.paths.size(); ++p) {
        Detection clean;
        clean.camera_id = spec_.camera_id;
        clean.frame_index = k;
        clean.timestamp = t;
        clean.translation = spec_.paths[p].position(t);
        ideal_pose(spec_, p, t, clean.global_orient, clean.body_pose);

        // Fixed draw order per person keeps streams aligned across noise settings.
        const bool dropped = uniform(rng_) < spec_.dropout_prob;
        clean.confidence = std::clamp(spec_.confidence.mean + spec_.confidence.sigma * normal(rng_), 0.0, 1.0);

        Detection noisy = clean;
        for (int c = 0; c < 3; ++c) {
            noisy.translation[c] += spec_.noise_sigma_trans * normal(rng_);
        }
        noisy.translation.z() = std::max(noisy.translation.z(), 0.1);
        Vec3 orient_noise;
        for (int c = 0; c < 3; ++c) orient_noise[c] = spec_.noise_sigma_pose * normal(rng_);
        noisy.global_orient = canonical_axis_angle(clean.global_orient + orient_noise);
        for (auto& r : noisy.body_pose) {
            Vec3 n;
            for (int c = 0; c < 3; ++c) n[c] = spec_.noise_sigma_pose * normal(rng_);
            r = canonical_axis_angle(r + n);
        }

        truth.persons.emplace_back(static_cast<int>(p), clean);
        if (!dropped) {
            frame.detections.push_back(std::move(noisy));
        }
    }
    return std::make_pair(std::move(frame), std::move(truth));
}

GeneratedScenario generate(const ScenarioSpec& spec) {
    ScenarioGenerator gen(spec);
    GeneratedScenario out;
    while (auto item = gen.next()) {
        out.frames.push_back(std::move(item->first));
        out.truth.push_back(std::move(item->second));
    }
    return out;
}

ScenarioSpec walkers_scenario(int persons, double duration, double rate, std::uint64_t seed) {
    ScenarioSpec s;
    s.duration = duration;
    s.rate = rate;
    s.seed = seed;
    for (int i = 0; i < persons; ++i) {
        PersonPath p;
        p.kind = PathKind::Linear;
        p.origin = Vec3(3.0 * (i - 0.5 * (persons - 1)), 0.3, 4.0);
        p.velocity = Vec3(0.25, 0.02 * (i % 2 == 0 ? 1 : -1), 0.0);
        p.phase = 0.7 * i;
        s.paths.push_back(p);
    }
    return s;
}

ScenarioSpec crossing_scenario(double depth_gap, double duration, double rate, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);

    ScenarioSpec s;
    s.duration = duration;
    s.rate = rate;
    s.seed = seed;
    s.noise_sigma_trans = 0.02;
    s.noise_sigma_pose = 0.03;
    s.dropout_prob = 0.02;

    const double near_z = 3.0 + jitter(rng);
    const double far_z = near_z + depth_gap;
    const double span = 3.0 + jitter(rng);

    PersonPath near;
    near.origin = Vec3(-0.5 * span, 0.3, near_z);
    near.velocity = Vec3(span / duration, 0.0, 0.0);
    near.phase = 0.0;

    // Mirrored in image space so the projected paths cross mid-sequence.
    const double scale = far_z / near_z;
    PersonPath far;
    far.origin = Vec3(0.5 * span * scale, 0.3 * scale, far_z);
    far.velocity = Vec3(-span * scale / duration, 0.0, 0.0);
    far.phase = 1.3;

    s.paths = {near, far};
    return s;
}

ScenarioSpec default_noisy_scenario(std::uint64_t seed) {
    ScenarioSpec s;
    s.duration = 20.0;
    s.rate = 30.0;
    s.seed = seed;
    s.noise_sigma_pose = 0.05;
    s.noise_sigma_trans = 0.02;
    PersonPath p;
    p.kind = PathKind::Circular;
    p.origin = Vec3(0.0, 0.3, 3.5);
    p.radius = 0.8;
    p.angular_speed = 0.5;
    s.paths = {p};
    return s;
}

ScenarioSpec mixed_scenario(const std::string& camera_id, int persons, double duration, double rate,
                            std::uint64_t seed) {
    ScenarioSpec s;
    s.camera_id = camera_id;
    s.duration = duration;
    s.rate = rate;
    s.seed = seed;
    s.noise_sigma_trans = 0.01;
    s.noise_sigma_pose = 0.03;
    s.dropout_prob = 0.01;
    for (int i = 0; i < persons; ++i) {
        const double lane = persons > 1 ? -1.5 + 3.0 * i / (persons - 1) : 0.0;
        PersonPath p;
        if (i % 2 == 0) {
            p.kind = PathKind::Circular;
            p.origin = Vec3(lane, 0.3, 3.5);
            p.radius = 0.3;
            p.angular_speed = 0.6;
        } else {
            p.kind = PathKind::Linear;
            p.origin = Vec3(lane, 0.3, 3.0);
            p.velocity = Vec3(0.0, 0.0, 0.05);
        }
        p.phase = 0.9 * i;
        s.paths.push_back(p);
    }
    return s;
}

} // namespace mocap::sources
