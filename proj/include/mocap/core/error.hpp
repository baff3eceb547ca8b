#pragma once

#include <stdexcept>
#include <string>

namespace mocap {

/// Input that violates a data-model invariant (z <= 0, confidence outside
/// [0,1], non-monotone timestamps). Callers drop the offending item and count it.
class RejectedInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed serialized record (replay lines, skeleton files, wire payloads).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration; raised before anything starts running.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mocap
