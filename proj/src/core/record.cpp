#include "mocap/core/record.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mocap {

void append_json_string(std::string& out, std::string_view s) {
    static constexpr char kHex[] = "0123456789abcdef";
    out.push_back('"');
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                out += "\\u00";
                out.push_back(kHex[(c >> 4) & 0xF]);
                out.push_back(kHex[c & 0xF]);
            } else {
                out.push_back(c);
            }
        }
    }
    out.push_back('"');
}

namespace {

template <typename T>
void append_float(std::string& out, T v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite number cannot be serialized");
    }
    if (v == 0) {
        v = 0;  // fold -0 so equal values serialize identically
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

} // namespace

void append_number(std::string& out, double v) { append_float(out, v); }
void append_number(std::string& out, float v) { append_float(out, v); }

void RecordWriter::key(std::string_view k) {
    if (!first_) {
        buf_.push_back(',');
    }
    first_ = false;
    append_json_string(buf_, k);
    buf_.push_back(':');
}

RecordWriter& RecordWriter::field(std::string_view k, std::string_view value) {
    key(k);
    append_json_string(buf_, value);
    return *this;
}

RecordWriter& RecordWriter::field(std::string_view k, std::int64_t value) {
    key(k);
    buf_ += std::to_string(value);
    return *this;
}

RecordWriter& RecordWriter::field(std::string_view k, double value) {
    key(k);
    append_number(buf_, value);
    return *this;
}

RecordWriter& RecordWriter::field(std::string_view k, bool value) {
    key(k);
    buf_ += value ? "true" : "false";
    return *this;
}

RecordWriter& RecordWriter::field_f32(std::string_view k, float value) {
    key(k);
    append_number(buf_, value);
    return *this;
}

RecordWriter& RecordWriter::array(std::string_view k, std::span<const double> values) {
    key(k);
    buf_.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_.push_back(',');
        append_number(buf_, values[i]);
    }
    buf_.push_back(']');
    return *this;
}

RecordWriter& RecordWriter::array_f32(std::string_view k, std::span<const float> values) {
    key(k);
    buf_.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_.push_back(',');
        append_number(buf_, values[i]);
    }
    buf_.push_back(']');
    return *this;
}

RecordWriter& RecordWriter::raw(std::string_view k, std::string_view json) {
    key(k);
    buf_.append(json);
    return *this;
}

} // namespace mocap
