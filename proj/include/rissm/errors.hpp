#pragma once

#include <stdexcept>
#include <string>

namespace rissm {

/// Out-of-domain numeric parameter (non-positive shape, zero dimensions, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Antenna, symbol or class index outside its valid range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Mismatched vector/matrix dimensions or bit-string lengths.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid or incomplete scenario / experiment / training configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model file or CSV input.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rissm
