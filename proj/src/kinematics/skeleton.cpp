#include "mocap/kinematics/skeleton.hpp"

#include "mocap/core/error.hpp"
#include "mocap/core/json_util.hpp"
#include "mocap/core/record.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace mocap::kinematics {

namespace {

struct JointRow {
    const char* name;
    int parent;
    double x, y, z;
};

// Mirrors data/smpl_skeleton.jsonl.
constexpr JointRow kSmplRows[kJointCount] = {
    {"pelvis", -1, 0.0, 0.0, 0.0},
    {"left_hip", 0, 0.0695, -0.0914, -0.0068},
    {"right_hip", 0, -0.0677, -0.0905, -0.0043},
    {"spine1", 0, -0.0025, 0.109, -0.0267},
    {"left_knee", 1, 0.0343, -0.3752, -0.0045},
    {"right_knee", 2, -0.0383, -0.3827, -0.0088},
    {"spine2", 3, 0.0055, 0.1352, 0.0011},
    {"left_ankle", 4, -0.0136, -0.398, -0.0437},
    {"right_ankle", 5, 0.0158, -0.3984, -0.0423},
    {"spine3", 6, 0.0015, 0.0529, 0.0254},
    {"left_foot", 7, 0.0264, -0.0558, 0.1193},
    {"right_foot", 8, -0.0254, -0.0481, 0.1233},
    {"neck", 9, -0.0028, 0.2139, -0.0429},
    {"left_collar", 9, 0.0788, 0.1217, -0.0341},
    {"right_collar", 9, -0.0818, 0.1188, -0.0386},
    {"head", 12, 0.0052, 0.065, 0.0513},
    {"left_shoulder", 13, 0.091, 0.0305, -0.0089},
    {"right_shoulder", 14, -0.096, 0.0326, -0.0091},
    {"left_elbow", 16, 0.2596, -0.0128, -0.0275},
    {"right_elbow", 17, -0.2537, -0.0134, -0.021},
    {"left_wrist", 18, 0.2492, 0.009, -0.0012},
    {"right_wrist", 19, -0.2553, 0.0078, -0.0056},
    {"left_hand", 20, 0.084, -0.0082, -0.0149},
    {"right_hand", 21, -0.0847, -0.0061, -0.0103},
};

Skeleton build_default() {
    Skeleton s;
    for (std::size_t i = 0; i < kJointCount; ++i) {
        s.joint_names[i] = kSmplRows[i].name;
        s.parent[i] = kSmplRows[i].parent;
        s.rest_offsets[i] = Vec3(kSmplRows[i].x, kSmplRows[i].y, kSmplRows[i].z);
    }
    return s;
}

} // namespace

void Skeleton::validate() const {
    if (parent[0] != -1) {
        throw ParseError("skeleton root (joint 0) must have parent -1");
    }
    for (std::size_t i = 1; i < kJointCount; ++i) {
        if (parent[i] < 0 || parent[i] >= static_cast<int>(i)) {
            throw ParseError("skeleton joint " + std::to_string(i) + " has parent " + std::to_string(parent[i]) +
                             "; parents must precede their children");
        }
    }
    for (std::size_t i = 0; i < kJointCount; ++i) {
        if (!rest_offsets[i].allFinite()) {
            throw ParseError("skeleton joint " + std::to_string(i) + " has a non-finite offset");
        }
    }
}

const Skeleton& Skeleton::smpl_default() {
    static const Skeleton skel = build_default();
    return skel;
}

Skeleton parse_skeleton(std::string_view text) {
    std::vector<json_util::Json> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') {
            continue;
        }
        try {
            rows.push_back(json_util::parse_object(line));
        } catch (const ParseError& e) {
            throw ParseError("skeleton line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (rows.size() != kJointCount) {
        throw ParseError("skeleton must define exactly 24 joints, found " + std::to_string(rows.size()));
    }
    Skeleton s;
    for (std::size_t i = 0; i < kJointCount; ++i) {
        try {
            s.joint_names[i] = json_util::get_string(rows[i], "name");
            s.parent[i] = static_cast<int>(json_util::get_int(rows[i], "parent"));
            s.rest_offsets[i] = json_util::get_vec3(rows[i], "offset");
        } catch (const ParseError& e) {
            throw ParseError("skeleton joint " + std::to_string(i) + ": " + e.what());
        }
    }
    s.validate();
    return s;
}

Skeleton load_skeleton(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open skeleton file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_skeleton(ss.str());
}

std::string to_text(const Skeleton& skel) {
    std::string out;
    for (std::size_t i = 0; i < kJointCount; ++i) {
        RecordWriter w;
        w.field("name", skel.joint_names[i])
            .field("parent", skel.parent[i])
            .array("offset", std::span<const double>(skel.rest_offsets[i].data(), 3));
        out += w.str();
        out.push_back('\n');
    }
    return out;
}

std::array<Vec3, kJointCount> rest_positions(const Skeleton& skel) {
    std::array<Vec3, kJointCount> pos;
    pos[0] = Vec3::Zero();
    for (std::size_t i = 1; i < kJointCount; ++i) {
        pos[i] = pos[skel.parent[i]] + skel.rest_offsets[i];
    }
    return pos;
}

} // namespace mocap::kinematics
