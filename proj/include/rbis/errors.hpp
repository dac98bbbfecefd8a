#pragma once

#include <stdexcept>
#include <string>

namespace rbis {

/// Arithmetic left the representable picosecond range.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Master timestamps were not strictly increasing.
class OrderingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An SFN observation could not be mapped to a unique absolute event index.
class AmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An estimator was queried before it had processed any tuple.
class UninitializedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value violated an invariant. The message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed (message carries the line number).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation run had to abort (message carries event context).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rbis
