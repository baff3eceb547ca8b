#pragma once

#include "mocap/core/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

namespace mocap::kinematics {

/// 24-joint kinematic tree with rest-pose bone offsets (meters).
struct Skeleton {
    std::array<std::string, kJointCount> joint_names;
    std::array<int, kJointCount> parent{};       // parent[0] == -1
    std::array<Vec3, kJointCount> rest_offsets;  // joint minus parent, rest pose

    /// Throws ParseError describing the first violated tree invariant.
    void validate() const;

    /// Standard SMPL tree with average rest offsets.
    static const Skeleton& smpl_default();

    friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

/// Parses a skeleton file: one `{"name":..,"parent":..,"offset":[x,y,z]}`
/// record per line, exactly 24 records, '#' comments allowed. The result is validated.
Skeleton parse_skeleton(std::string_view text);
Skeleton load_skeleton(const std::filesystem::path& path);
std::string to_text(const Skeleton& skel);

/// Rest-pose joint positions relative to the root.
std::array<Vec3, kJointCount> rest_positions(const Skeleton& skel);

} // namespace mocap::kinematics
