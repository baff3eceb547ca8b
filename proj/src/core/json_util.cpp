#include "mocap/core/json_util.hpp"

namespace mocap::json_util {

Json parse_object(std::string_view text) {
    Json obj = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
        throw ParseError("record is not valid JSON");
    }
    if (!obj.is_object()) {
        throw ParseError("record is not an object");
    }
    return obj;
}

const Json& require(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("missing key '") + key + "'");
    }
    return *it;
}

std::string get_string(const Json& obj, const char* key) {
    const Json& v = require(obj, key);
    if (!v.is_string()) {
        throw ParseError(std::string("key '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::int64_t get_int(const Json& obj, const char* key) {
    const Json& v = require(obj, key);
    if (!v.is_number_integer()) {
        throw ParseError(std::string("key '") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

double get_number(const Json& obj, const char* key) {
    const Json& v = require(obj, key);
    if (!v.is_number()) {
        throw ParseError(std::string("key '") + key + "' must be a number");
    }
    return v.get<double>();
}

namespace {

void read_numbers(const Json& v, const char* key, std::size_t n, double* out) {
    if (!v.is_array() || v.size() != n) {
        throw ParseError(std::string("key '") + key + "' must be an array of " + std::to_string(n) + " numbers");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_number()) {
            throw ParseError(std::string("key '") + key + "' contains a non-number");
        }
        out[i] = v[i].get<double>();
    }
}

} // namespace

Vec3 get_vec3(const Json& obj, const char* key) {
    Vec3 out;
    read_numbers(require(obj, key), key, 3, out.data());
    return out;
}

BodyPose get_body_pose(const Json& obj, const char* key) {
    std::array<double, kPoseChannelCount> flat{};
    read_numbers(require(obj, key), key, kPoseChannelCount, flat.data());
    BodyPose pose;
    for (std::size_t j = 0; j < kBodyJointCount; ++j) {
        pose[j] = Vec3(flat[3 * j], flat[3 * j + 1], flat[3 * j + 2]);
    }
    return pose;
}

Detection detection_from_json(const Json& obj) {
    Detection d;
    d.camera_id = get_string(obj, "camera_id");
    d.frame_index = get_int(obj, "frame_index");
    d.timestamp = get_number(obj, "timestamp");
    d.confidence = get_number(obj, "confidence");
    d.global_orient = get_vec3(obj, "global_orient");
    d.body_pose = get_body_pose(obj, "body_pose");
    d.translation = get_vec3(obj, "translation");
    return d;
}

} // namespace mocap::json_util
