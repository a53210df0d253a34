#pragma once

#include <dssim/core.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dssim::resource {

struct OppPoint {
    double voltage_v = 0.0;
    double frequency_hz = 0.0;

    friend bool operator==(const OppPoint&, const OppPoint&) = default;
};

enum class PeType { GeneralCore, Accelerator };

struct DvfsPolicy {
    enum class Kind { Ondemand, Performance, Powersave, Fixed };
    Kind kind = Kind::Performance;
    int fixed_index = 0;

    /// Accepts "ondemand", "performance", "powersave" and "fixed:<index>".
    static DvfsPolicy parse(const std::string& text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const DvfsPolicy&, const DvfsPolicy&) = default;
};

/// Dynamic power is C * V^2 * A * f; static power is V * (leak_a * T + leak_b).
struct PowerProfile {
    double cap_f = 0.0;
    double activity = 0.0;
    double leak_a = 0.0;
    double leak_b = 0.0;

    friend bool operator==(const PowerProfile&, const PowerProfile&) = default;
};

struct PeDescriptor {
    PeId id = 0;
    std::string name;
    PeType type = PeType::GeneralCore;
    std::string subtype;
    /// DVFS / plane-analysis group. Defaults to the subtype.
    std::string cluster;
    int capacity = 1;
    std::vector<OppPoint> opps;
    /// Microseconds at the maximum OPP.
    std::map<std::string, double> latency_profile_us;
    PowerProfile power;
    double area_mm2 = 0.0;
    DvfsPolicy dvfs_policy;

    [[nodiscard]] bool supports(const std::string& kind) const { return latency_profile_us.contains(kind); }
    [[nodiscard]] int max_opp_index() const { return static_cast<int>(opps.size()) - 1; }
    [[nodiscard]] double max_frequency_hz() const { return opps.back().frequency_hz; }
    /// One RC node per general-purpose cluster plus one shared accelerator node.
    [[nodiscard]] std::string thermal_zone() const {
        return type == PeType::Accelerator ? std::string("accelerators") : cluster;
    }

    friend bool operator==(const PeDescriptor&, const PeDescriptor&) = default;
};

/// Raised when a task kind is asked of a PE that has no profile for it.
class UnsupportedTask : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// profile_latency * f_max / f(opp_index), in nanoseconds.
[[nodiscard]] SimTime scaled_latency_ns(const PeDescriptor& pe, const std::string& kind, int opp_index);
[[nodiscard]] double scaled_latency(const PeDescriptor& pe, const std::string& kind, int opp_index);

/// Piecewise-linear lookup over ascending x knots; clamps outside the range.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    /// `saturated` is set when x lies beyond the last knot.
    [[nodiscard]] double operator()(double x, bool* saturated = nullptr) const;
    [[nodiscard]] bool non_decreasing() const;
    [[nodiscard]] const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
    [[nodiscard]] double min_value() const;

    friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

private:
    std::vector<std::pair<double, double>> knots_;
};

struct NocModel {
    double bandwidth_bytes_per_us = 128.0;
    /// Number of simultaneous inter-PE transfers treated as load 1.0.
    double link_capacity = 8.0;
    PiecewiseLinear load_latency_us;

    friend bool operator==(const NocModel&, const NocModel&) = default;
};

struct DramModel {
    double window_us = 100.0;
    /// GB/s -> ns.
    PiecewiseLinear bandwidth_latency_ns;

    friend bool operator==(const DramModel&, const DramModel&) = default;
};

struct ThermalConfig {
    double r_k_per_w = 10.0;
    double c_j_per_k = 0.1;
    double ambient_c = 25.0;
    double trip_c = 95.0;
    double hysteresis_c = 5.0;
    /// Per-zone (r, c) overrides.
    std::map<std::string, std::pair<double, double>> zones;

    [[nodiscard]] std::pair<double, double> rc_for(const std::string& zone) const {
        auto it = zones.find(zone);
        return it == zones.end() ? std::pair{r_k_per_w, c_j_per_k} : it->second;
    }

    friend bool operator==(const ThermalConfig&, const ThermalConfig&) = default;
};

struct OndemandThresholds {
    double low = 0.3;
    double high = 0.8;

    friend bool operator==(const OndemandThresholds&, const OndemandThresholds&) = default;
};

struct SocConfig {
    std::string name;
    std::vector<PeDescriptor> pes;
    NocModel noc;
    DramModel dram;
    double uncore_area_mm2 = 0.0;
    double dtpm_epoch_us = 20000.0;
    ThermalConfig thermal;
    OndemandThresholds ondemand;
    std::optional<double> utilization_window_us;
    /// Non-fatal validation notes (e.g. DTPM epoch outside 10-100 ms).
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t index_of(PeId id) const;
    [[nodiscard]] std::vector<std::string> clusters() const;
    [[nodiscard]] std::vector<std::string> thermal_zones() const;
    [[nodiscard]] double utilization_window() const { return utilization_window_us.value_or(dtpm_epoch_us); }

    friend bool operator==(const SocConfig& a, const SocConfig& b) {
        return a.name == b.name && a.pes == b.pes && a.noc == b.noc && a.dram == b.dram &&
               a.uncore_area_mm2 == b.uncore_area_mm2 && a.dtpm_epoch_us == b.dtpm_epoch_us &&
               a.thermal == b.thermal && a.ondemand == b.ondemand &&
               a.utilization_window_us == b.utilization_window_us;
    }
};

/// Parses and validates; every failure is a ConfigError naming the field.
[[nodiscard]] SocConfig soc_from_json(const nlohmann::json& j);
[[nodiscard]] SocConfig load_soc_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const SocConfig& soc);
[[nodiscard]] nlohmann::json pe_to_json(const PeDescriptor& pe);
[[nodiscard]] PeDescriptor pe_from_json(const nlohmann::json& j);

/// Re-checks every invariant; used after programmatic edits (DSE).
void validate(SocConfig& soc);

struct BlockingCounters {
    std::uint64_t busy = 0;
    std::uint64_t total = 0;

    [[nodiscard]] bool has_data() const noexcept { return total > 0; }
    /// busy / total, or 0 when there is no data.
    [[nodiscard]] double ratio() const noexcept {
        return total == 0 ? 0.0 : static_cast<double>(busy) / static_cast<double>(total);
    }
};

/// Mutable per-PE state owned by one kernel instance.
struct PeRuntimeState {
    int current_opp = 0;
    int busy_slots = 0;
    BlockingCounters blocking;
    /// (busy slot-time, window capacity-time) per closed window, newest last.
    std::vector<std::pair<double, double>> utilization_samples;
    static constexpr std::size_t kWindowSamples = 4;

    void push_utilization_sample(double busy, double window);
    [[nodiscard]] double windowed_utilization() const;
};

void record_blocking_observation(PeRuntimeState& state, bool pe_busy);

} // namespace dssim::resource
