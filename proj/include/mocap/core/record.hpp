#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mocap {

/// Builds one flat line record `{"key":value,...}` with keys in insertion
/// order and numbers in shortest round-trip form. The output is byte-stable,
/// which the wire protocol's golden transcripts depend on.
class RecordWriter {
public:
    RecordWriter& field(std::string_view key, std::string_view value);
    RecordWriter& field(std::string_view key, const char* value) { return field(key, std::string_view(value)); }
    RecordWriter& field(std::string_view key, std::int64_t value);
    RecordWriter& field(std::string_view key, int value) { return field(key, static_cast<std::int64_t>(value)); }
    RecordWriter& field(std::string_view key, double value);
    RecordWriter& field(std::string_view key, bool value);
    RecordWriter& field_f32(std::string_view key, float value);
    RecordWriter& array(std::string_view key, std::span<const double> values);
    RecordWriter& array_f32(std::string_view key, std::span<const float> values);
    /// Inserts already-serialized JSON (nested records, arrays of records).
    RecordWriter& raw(std::string_view key, std::string_view json);

    std::string str() const { return buf_ + "}"; }

private:
    void key(std::string_view k);

    std::string buf_ = "{";
    bool first_ = true;
};

void append_json_string(std::string& out, std::string_view s);
void append_number(std::string& out, double v);
void append_number(std::string& out, float v);

} // namespace mocap
