#pragma once

// Helpers for reading line records with nlohmann::json. Only included from
// translation units that parse records.

#include "mocap/core/error.hpp"
#include "mocap/core/types.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace mocap::json_util {

using Json = nlohmann::json;

Json parse_object(std::string_view text);

const Json& require(const Json& obj, const char* key);
std::string get_string(const Json& obj, const char* key);
std::int64_t get_int(const Json& obj, const char* key);
double get_number(const Json& obj, const char* key);
Vec3 get_vec3(const Json& obj, const char* key);
BodyPose get_body_pose(const Json& obj, const char* key);

/// Detection fields from an already-parsed object.
Detection detection_from_json(const Json& obj);

} // namespace mocap::json_util
