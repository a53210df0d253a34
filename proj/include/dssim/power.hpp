#pragma once

#include <dssim/resource.hpp>

#include <cstdint>
#include <optional>

namespace dssim::power {

/// C * V^2 * (busy_fraction * A) * f, in watts.
[[nodiscard]] double dynamic_power(const resource::PeDescriptor& pe, const resource::OppPoint& opp,
                                   double busy_fraction);

/// V * (leak_a * T + leak_b), clamped at zero.
[[nodiscard]] double static_power(const resource::PeDescriptor& pe, const resource::OppPoint& opp,
                                  double temperature_c);

/// First-order RC node for one thermal zone.
struct ThermalModel {
    double r_k_per_w = 10.0;
    double c_j_per_k = 0.1;
    double ambient_c = 25.0;
    double trip_c = 95.0;
    double hysteresis_c = 5.0;

    static ThermalModel for_zone(const resource::ThermalConfig& cfg, const std::string& zone);
    [[nodiscard]] double steady_state(double power_w) const { return ambient_c + r_k_per_w * power_w; }
};

struct ThermalState {
    double temperature_c = 25.0;
    bool throttled = false;
};

/// T += k * (R*P + T_amb - T) with k = dt / (R*C), k capped at 1 so a long
/// step lands on the steady state instead of overshooting it. Throttling
/// latches at T >= trip and releases once T < trip - hysteresis.
[[nodiscard]] ThermalState step_thermal(const ThermalModel& model, double total_power_w, double dt_us,
                                        const ThermalState& prev);

/// Largest temperature rise a single step can produce from `from_c`.
[[nodiscard]] double max_step_rise(const ThermalModel& model, double max_power_w, double dt_us, double from_c);

/// Next OPP index under the ondemand rule: below `low` step down one index,
/// above `high` jump to the maximum, otherwise hold.
[[nodiscard]] int ondemand_step(int current_index, int max_index, double utilization,
                                const resource::OndemandThresholds& thresholds);

/// OPP index chosen by a policy at an epoch boundary. Throws ConfigError for
/// a fixed index outside the PE's table.
[[nodiscard]] int governor_target(const resource::DvfsPolicy& policy, int current_index, int max_index,
                                  double utilization, const resource::OndemandThresholds& thresholds);

/// OPP index a PE starts the run at.
[[nodiscard]] int initial_opp(const resource::DvfsPolicy& policy, int max_index);

/// Integrates power over time. 1 W for 1 us is 1 uJ.
class EnergyAccumulator {
public:
    void add(double power_w, double dt_us);
    [[nodiscard]] double total_uj() const noexcept { return total_uj_; }
    /// Undefined (nullopt) with zero completed jobs.
    [[nodiscard]] std::optional<double> per_job(std::uint64_t completed_jobs) const;

private:
    double total_uj_ = 0.0;
};

} // namespace dssim::power
