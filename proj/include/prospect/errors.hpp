#pragma once

#include <stdexcept>
#include <string>

namespace prospect {

// Configuration / input file problems. CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Model structure or validation failures. CLI exit code 2.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Preference validation / well-posedness failures. CLI exit code 3.
struct PreferenceError : std::runtime_error {
    explicit PreferenceError(const std::string& what) : std::runtime_error(what) {}
};

// A control evaluator returned something outside its admissible range.
struct ControlError : std::runtime_error {
    explicit ControlError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or other numerical aborts. CLI exit code 5.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Requested operation is documented as out of scope for the given variant.
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prospect
