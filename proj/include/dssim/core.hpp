#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dssim {

/// Virtual simulation time in nanoseconds. Latency profiles are whole
/// microseconds, so every profile value is an exact multiple of 1000.
using SimTime = std::uint64_t;

inline constexpr SimTime kNsPerUs = 1000;

[[nodiscard]] inline SimTime us_to_ns(double us) {
    return static_cast<SimTime>(std::llround(us * static_cast<double>(kNsPerUs)));
}

[[nodiscard]] inline double ns_to_us(SimTime ns) {
    return static_cast<double>(ns) / static_cast<double>(kNsPerUs);
}

/// Invalid input: malformed files, failed validation, bad scheduler output.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while a simulation or search is running. CLI exit code 3.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using JobId = std::uint32_t;
using TaskId = std::uint32_t;
using PeId = int;

} // namespace dssim
