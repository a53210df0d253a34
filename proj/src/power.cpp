#include <dssim/power.hpp>

#include <algorithm>

namespace dssim::power {

double dynamic_power(const resource::PeDescriptor& pe, const resource::OppPoint& opp, double busy_fraction) {
    const double activity = std::clamp(busy_fraction, 0.0, 1.0) * pe.power.activity;
    return pe.power.cap_f * opp.voltage_v * opp.voltage_v * activity * opp.frequency_hz;
}

double static_power(const resource::PeDescriptor& pe, const resource::OppPoint& opp, double temperature_c) {
    return std::max(0.0, opp.voltage_v * (pe.power.leak_a * temperature_c + pe.power.leak_b));
}

ThermalModel ThermalModel::for_zone(const resource::ThermalConfig& cfg, const std::string& zone) {
    auto [r, c] = cfg.rc_for(zone);
    return {r, c, cfg.ambient_c, cfg.trip_c, cfg.hysteresis_c};
}

ThermalState step_thermal(const ThermalModel& model, double total_power_w, double dt_us, const ThermalState& prev) {
    const double dt_s = dt_us * 1e-6;
    const double k = std::min(1.0, dt_s / (model.r_k_per_w * model.c_j_per_k));
    ThermalState next;
    next.temperature_c =
        prev.temperature_c + k * (model.r_k_per_w * total_power_w + model.ambient_c - prev.temperature_c);
    if (next.temperature_c >= model.trip_c) {
        next.throttled = true;
    } else if (prev.throttled) {
        next.throttled = next.temperature_c >= model.trip_c - model.hysteresis_c;
    }
    return next;
}

double max_step_rise(const ThermalModel& model, double max_power_w, double dt_us, double from_c) {
    const double k = std::min(1.0, dt_us * 1e-6 / (model.r_k_per_w * model.c_j_per_k));
    return std::max(0.0, k * (model.r_k_per_w * max_power_w + model.ambient_c - from_c));
}

int ondemand_step(int current_index, int max_index, double utilization,
                  const resource::OndemandThresholds& thresholds) {
    if (utilization > thresholds.high) return max_index;
    if (utilization < thresholds.low) return std::max(0, current_index - 1);
    return std::clamp(current_index, 0, max_index);
}

int governor_target(const resource::DvfsPolicy& policy, int current_index, int max_index, double utilization,
                    const resource::OndemandThresholds& thresholds) {
    using Kind = resource::DvfsPolicy::Kind;
    switch (policy.kind) {
    case Kind::Performance: return max_index;
    case Kind::Powersave: return 0;
    case Kind::Ondemand: return ondemand_step(current_index, max_index, utilization, thresholds);
    case Kind::Fixed:
        if (policy.fixed_index < 0 || policy.fixed_index > max_index) {
            throw ConfigError("fixed OPP index " + std::to_string(policy.fixed_index) + " out of range [0, " +
                              std::to_string(max_index) + "]");
        }
        return policy.fixed_index;
    }
    return max_index;
}

int initial_opp(const resource::DvfsPolicy& policy, int max_index) {
    // Ondemand boots at the top OPP, like the Linux governor after init.
    return governor_target(policy, max_index, max_index, 1.0, {});
}

void EnergyAccumulator::add(double power_w, double dt_us) {
    if (dt_us > 0.0) total_uj_ += power_w * dt_us;
}

std::optional<double> EnergyAccumulator::per_job(std::uint64_t completed_jobs) const {
    if (completed_jobs == 0) return std::nullopt;
    return total_uj_ / static_cast<double>(completed_jobs);
}

} // namespace dssim::power
