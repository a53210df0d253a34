#include <dssim/resource.hpp>

#include <dssim/app.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace dssim::resource {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

PiecewiseLinear table_from_json(const json& j, const std::string& where) {
    std::vector<std::pair<double, double>> knots;
    try {
        for (const auto& k : j) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
    } catch (const json::exception&) {
        throw ConfigError(where + ": expected a list of [x, y] pairs");
    }
    try {
        return PiecewiseLinear(std::move(knots));
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

json table_to_json(const PiecewiseLinear& t) {
    json out = json::array();
    for (const auto& [x, y] : t.knots()) out.push_back({x, y});
    return out;
}

std::string type_name(PeType t) { return t == PeType::Accelerator ? "accelerator" : "general-core"; }

PiecewiseLinear default_noc_table() { return PiecewiseLinear({{0.0, 1.0}, {0.5, 1.5}, {0.8, 3.0}, {1.0, 6.0}}); }

// Flat 50 ns up to 80% of a 12.8 GB/s peak, then a knee up to 400 ns.
PiecewiseLinear default_dram_table() { return PiecewiseLinear({{0.0, 50.0}, {10.24, 50.0}, {12.8, 400.0}}); }

} // namespace

DvfsPolicy DvfsPolicy::parse(const std::string& text) {
    if (text == "ondemand") return {Kind::Ondemand, 0};
    if (text == "performance") return {Kind::Performance, 0};
    if (text == "powersave") return {Kind::Powersave, 0};
    if (text.rfind("fixed:", 0) == 0) {
        try {
            std::size_t used = 0;
            int idx = std::stoi(text.substr(6), &used);
            if (used == text.size() - 6 && idx >= 0) return {Kind::Fixed, idx};
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("invalid DVFS policy '" + text + "' (ondemand|performance|powersave|fixed:<index>)");
}

std::string DvfsPolicy::to_string() const {
    switch (kind) {
    case Kind::Ondemand: return "ondemand";
    case Kind::Performance: return "performance";
    case Kind::Powersave: return "powersave";
    case Kind::Fixed: return "fixed:" + std::to_string(fixed_index);
    }
    return "performance";
}

SimTime scaled_latency_ns(const PeDescriptor& pe, const std::string& kind, int opp_index) {
    auto it = pe.latency_profile_us.find(kind);
    if (it == pe.latency_profile_us.end()) {
        throw UnsupportedTask("PE " + std::to_string(pe.id) + " (" + pe.name + ") does not support task kind '" +
                              kind + "'");
    }
    if (opp_index < 0 || opp_index > pe.max_opp_index()) {
        throw ConfigError("PE " + std::to_string(pe.id) + ": OPP index " + std::to_string(opp_index) +
                          " out of range");
    }
    const double ratio = pe.max_frequency_hz() / pe.opps[static_cast<std::size_t>(opp_index)].frequency_hz;
    return us_to_ns(it->second * ratio);
}

double scaled_latency(const PeDescriptor& pe, const std::string& kind, int opp_index) {
    return ns_to_us(scaled_latency_ns(pe, kind, opp_index));
}

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw ConfigError("lookup table needs at least one knot");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].first > knots_[i - 1].first)) throw ConfigError("lookup table x values must increase");
    }
    for (const auto& [x, y] : knots_) {
        if (!std::isfinite(x) || !std::isfinite(y) || y < 0.0) {
            throw ConfigError("lookup table values must be finite and non-negative");
        }
    }
}

double PiecewiseLinear::operator()(double x, bool* saturated) const {
    if (saturated != nullptr) *saturated = x > knots_.back().first;
    if (x <= knots_.front().first) return knots_.front().second;
    if (x >= knots_.back().first) return knots_.back().second;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    auto lo = std::prev(hi);
    const double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

bool PiecewiseLinear::non_decreasing() const {
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i].second < knots_[i - 1].second) return false;
    }
    return true;
}

double PiecewiseLinear::min_value() const {
    double m = knots_.front().second;
    for (const auto& k : knots_) m = std::min(m, k.second);
    return m;
}

std::size_t SocConfig::index_of(PeId id) const {
    for (std::size_t i = 0; i < pes.size(); ++i) {
        if (pes[i].id == id) return i;
    }
    throw ConfigError("unknown PE id " + std::to_string(id));
}

std::vector<std::string> SocConfig::clusters() const {
    std::vector<std::string> out;
    for (const auto& pe : pes) {
        if (std::find(out.begin(), out.end(), pe.cluster) == out.end()) out.push_back(pe.cluster);
    }
    return out;
}

std::vector<std::string> SocConfig::thermal_zones() const {
    std::vector<std::string> out;
    for (const auto& pe : pes) {
        auto z = pe.thermal_zone();
        if (std::find(out.begin(), out.end(), z) == out.end()) out.push_back(z);
    }
    return out;
}

PeDescriptor pe_from_json(const json& j) {
    const std::string where = "PE " + (j.is_object() && j.contains("id") ? j["id"].dump() : std::string("?"));
    check_keys(j,
               {"id", "name", "type", "subtype", "cluster", "capacity", "opps", "latency_profile_us", "power",
                "area_mm2", "dvfs_policy"},
               where);
    PeDescriptor pe;
    pe.id = field<int>(j, "id", where);
    pe.name = field<std::string>(j, "name", where);
    const auto type = field<std::string>(j, "type", where);
    if (type == "general-core") {
        pe.type = PeType::GeneralCore;
    } else if (type == "accelerator") {
        pe.type = PeType::Accelerator;
    } else {
        throw ConfigError(where + ": field 'type' must be general-core or accelerator");
    }
    pe.subtype = field<std::string>(j, "subtype", where);
    pe.cluster = field_or<std::string>(j, "cluster", pe.subtype, where);
    pe.capacity = field_or<int>(j, "capacity", 1, where);
    if (!j.contains("opps") || !j["opps"].is_array()) throw ConfigError(where + ": missing field 'opps'");
    for (const auto& o : j["opps"]) {
        check_keys(o, {"voltage_v", "frequency_mhz"}, where + " opp");
        pe.opps.push_back({field<double>(o, "voltage_v", where), field<double>(o, "frequency_mhz", where) * 1e6});
    }
    if (!j.contains("latency_profile_us") || !j["latency_profile_us"].is_object()) {
        throw ConfigError(where + ": missing field 'latency_profile_us'");
    }
    for (const auto& [kind, v] : j["latency_profile_us"].items()) {
        if (!v.is_number()) throw ConfigError(where + ": latency for '" + kind + "' must be a number");
        pe.latency_profile_us[kind] = v.get<double>();
    }
    if (j.contains("power")) {
        const auto& p = j["power"];
        check_keys(p, {"cap_f", "activity", "leak_a", "leak_b"}, where + " power");
        pe.power = {field<double>(p, "cap_f", where), field<double>(p, "activity", where),
                    field_or<double>(p, "leak_a", 0.0, where), field_or<double>(p, "leak_b", 0.0, where)};
    }
    pe.area_mm2 = field_or<double>(j, "area_mm2", 0.0, where);
    pe.dvfs_policy = DvfsPolicy::parse(field_or<std::string>(j, "dvfs_policy", "performance", where));
    return pe;
}

json pe_to_json(const PeDescriptor& pe) {
    json opps = json::array();
    for (const auto& o : pe.opps) opps.push_back({{"voltage_v", o.voltage_v}, {"frequency_mhz", o.frequency_hz / 1e6}});
    json profile = json::object();
    for (const auto& [k, v] : pe.latency_profile_us) profile[k] = v;
    return {{"id", pe.id},
            {"name", pe.name},
            {"type", type_name(pe.type)},
            {"subtype", pe.subtype},
            {"cluster", pe.cluster},
            {"capacity", pe.capacity},
            {"opps", opps},
            {"latency_profile_us", profile},
            {"power",
             {{"cap_f", pe.power.cap_f},
              {"activity", pe.power.activity},
              {"leak_a", pe.power.leak_a},
              {"leak_b", pe.power.leak_b}}},
            {"area_mm2", pe.area_mm2},
            {"dvfs_policy", pe.dvfs_policy.to_string()}};
}

void validate(SocConfig& soc) {
    soc.warnings.clear();
    if (soc.pes.empty()) throw ConfigError("pes: SoC must contain at least one PE");
    std::set<PeId> ids;
    const auto& known = app::known_task_kinds();
    for (const auto& pe : soc.pes) {
        const std::string where = "PE " + std::to_string(pe.id);
        if (!ids.insert(pe.id).second) throw ConfigError("pes: duplicate PE id " + std::to_string(pe.id));
        if (pe.capacity < 1) throw ConfigError(where + ": capacity must be >= 1");
        if (pe.opps.empty()) throw ConfigError(where + ": opps must not be empty");
        for (std::size_t i = 0; i < pe.opps.size(); ++i) {
            const auto& o = pe.opps[i];
            if (!(o.voltage_v > 0.0) || !(o.frequency_hz > 0.0)) {
                throw ConfigError(where + ": opps need positive voltage and frequency");
            }
            if (i > 0 && !(o.frequency_hz > pe.opps[i - 1].frequency_hz)) {
                throw ConfigError(where + ": opp frequencies must strictly increase");
            }
            if (i > 0 && o.voltage_v < pe.opps[i - 1].voltage_v) {
                throw ConfigError(where + ": opp voltages must not decrease with frequency");
            }
        }
        if (pe.latency_profile_us.empty()) throw ConfigError(where + ": latency_profile_us is empty");
        for (const auto& [kind, us] : pe.latency_profile_us) {
            if (!known.contains(kind)) throw ConfigError(where + ": unknown task kind '" + kind + "'");
            if (!(us > 0.0)) throw ConfigError(where + ": latency for '" + kind + "' must be > 0");
        }
        if (pe.area_mm2 < 0.0) throw ConfigError(where + ": area_mm2 must be >= 0");
        if (pe.power.cap_f < 0.0 || pe.power.activity < 0.0 || pe.power.activity > 1.0) {
            throw ConfigError(where + ": power.cap_f >= 0 and power.activity in [0,1] required");
        }
        if (pe.dvfs_policy.kind == DvfsPolicy::Kind::Fixed && pe.dvfs_policy.fixed_index > pe.max_opp_index()) {
            throw ConfigError(where + ": dvfs_policy fixed index " + std::to_string(pe.dvfs_policy.fixed_index) +
                              " out of range");
        }
    }
    if (!(soc.noc.bandwidth_bytes_per_us > 0.0) || !(soc.noc.link_capacity > 0.0)) {
        throw ConfigError("noc: bandwidth_bytes_per_us and link_capacity must be positive");
    }
    if (!soc.noc.load_latency_us.non_decreasing()) throw ConfigError("noc: load_latency_us must be non-decreasing");
    if (!(soc.dram.window_us > 0.0)) throw ConfigError("dram: window_us must be positive");
    if (!soc.dram.bandwidth_latency_ns.non_decreasing()) {
        throw ConfigError("dram: bandwidth_latency_ns must be non-decreasing");
    }
    if (soc.uncore_area_mm2 < 0.0) throw ConfigError("uncore_area_mm2 must be >= 0");
    if (!(soc.dtpm_epoch_us > 0.0)) throw ConfigError("dtpm_epoch_us must be positive");
    if (soc.dtpm_epoch_us < 10000.0 || soc.dtpm_epoch_us > 100000.0) {
        soc.warnings.push_back("dtpm_epoch_us " + std::to_string(soc.dtpm_epoch_us) +
                               " is outside the usual 10000-100000 us range");
    }
    const auto& t = soc.thermal;
    auto check_rc = [](double r, double c, const std::string& where) {
        if (!(r > 0.0) || !(c > 0.0)) throw ConfigError(where + ": r_k_per_w and c_j_per_k must be positive");
    };
    check_rc(t.r_k_per_w, t.c_j_per_k, "thermal");
    for (const auto& [zone, rc] : t.zones) check_rc(rc.first, rc.second, "thermal.zones." + zone);
    if (!(t.trip_c > t.ambient_c)) throw ConfigError("thermal: trip_c must exceed ambient_c");
    if (t.hysteresis_c < 0.0) throw ConfigError("thermal: hysteresis_c must be >= 0");
    if (!(soc.ondemand.low < soc.ondemand.high)) throw ConfigError("ondemand_thresholds: low must be < high");
    if (soc.utilization_window_us && !(*soc.utilization_window_us > 0.0)) {
        throw ConfigError("utilization_window_us must be positive");
    }
}

SocConfig soc_from_json(const json& j) {
    check_keys(j,
               {"name", "pes", "noc", "dram", "uncore_area_mm2", "dtpm_epoch_us", "thermal", "ondemand_thresholds",
                "utilization_window_us"},
               "soc");
    SocConfig soc;
    soc.name = field_or<std::string>(j, "name", "", "soc");
    if (!j.contains("pes") || !j["pes"].is_array()) throw ConfigError("soc: missing field 'pes'");
    for (const auto& p : j["pes"]) soc.pes.push_back(pe_from_json(p));

    soc.noc.load_latency_us = default_noc_table();
    if (j.contains("noc")) {
        const auto& n = j["noc"];
        check_keys(n, {"bandwidth_bytes_per_us", "link_capacity", "load_latency_us"}, "noc");
        soc.noc.bandwidth_bytes_per_us = field_or<double>(n, "bandwidth_bytes_per_us", 128.0, "noc");
        soc.noc.link_capacity = field_or<double>(n, "link_capacity", 8.0, "noc");
        if (n.contains("load_latency_us")) soc.noc.load_latency_us = table_from_json(n["load_latency_us"], "noc");
    }
    soc.dram.bandwidth_latency_ns = default_dram_table();
    if (j.contains("dram")) {
        const auto& d = j["dram"];
        check_keys(d, {"window_us", "bandwidth_latency_ns"}, "dram");
        soc.dram.window_us = field_or<double>(d, "window_us", 100.0, "dram");
        if (d.contains("bandwidth_latency_ns")) {
            soc.dram.bandwidth_latency_ns = table_from_json(d["bandwidth_latency_ns"], "dram");
        }
    }
    soc.uncore_area_mm2 = field_or<double>(j, "uncore_area_mm2", 0.0, "soc");
    soc.dtpm_epoch_us = field_or<double>(j, "dtpm_epoch_us", 20000.0, "soc");
    if (j.contains("thermal")) {
        const auto& t = j["thermal"];
        check_keys(t, {"r_k_per_w", "c_j_per_k", "ambient_c", "trip_c", "hysteresis_c", "zones"}, "thermal");
        soc.thermal.r_k_per_w = field_or<double>(t, "r_k_per_w", soc.thermal.r_k_per_w, "thermal");
        soc.thermal.c_j_per_k = field_or<double>(t, "c_j_per_k", soc.thermal.c_j_per_k, "thermal");
        soc.thermal.ambient_c = field_or<double>(t, "ambient_c", soc.thermal.ambient_c, "thermal");
        soc.thermal.trip_c = field_or<double>(t, "trip_c", soc.thermal.trip_c, "thermal");
        soc.thermal.hysteresis_c = field_or<double>(t, "hysteresis_c", soc.thermal.hysteresis_c, "thermal");
        if (t.contains("zones")) {
            for (const auto& [zone, z] : t["zones"].items()) {
                check_keys(z, {"r_k_per_w", "c_j_per_k"}, "thermal.zones." + zone);
                soc.thermal.zones[zone] = {field<double>(z, "r_k_per_w", "thermal.zones." + zone),
                                           field<double>(z, "c_j_per_k", "thermal.zones." + zone)};
            }
        }
    }
    if (j.contains("ondemand_thresholds")) {
        const auto& o = j["ondemand_thresholds"];
        check_keys(o, {"low", "high"}, "ondemand_thresholds");
        soc.ondemand.low = field<double>(o, "low", "ondemand_thresholds");
        soc.ondemand.high = field<double>(o, "high", "ondemand_thresholds");
    }
    if (j.contains("utilization_window_us")) {
        soc.utilization_window_us = field<double>(j, "utilization_window_us", "soc");
    }
    validate(soc);
    return soc;
}

SocConfig load_soc_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open SoC config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed SoC config " + path.string() + ": " + e.what());
    }
    return soc_from_json(j);
}

json to_json(const SocConfig& soc) {
    json pes = json::array();
    for (const auto& pe : soc.pes) pes.push_back(pe_to_json(pe));
    json zones = json::object();
    for (const auto& [zone, rc] : soc.thermal.zones) zones[zone] = {{"r_k_per_w", rc.first}, {"c_j_per_k", rc.second}};
    json out = {{"name", soc.name},
                {"pes", pes},
                {"noc",
                 {{"bandwidth_bytes_per_us", soc.noc.bandwidth_bytes_per_us},
                  {"link_capacity", soc.noc.link_capacity},
                  {"load_latency_us", table_to_json(soc.noc.load_latency_us)}}},
                {"dram",
                 {{"window_us", soc.dram.window_us},
                  {"bandwidth_latency_ns", table_to_json(soc.dram.bandwidth_latency_ns)}}},
                {"uncore_area_mm2", soc.uncore_area_mm2},
                {"dtpm_epoch_us", soc.dtpm_epoch_us},
                {"thermal",
                 {{"r_k_per_w", soc.thermal.r_k_per_w},
                  {"c_j_per_k", soc.thermal.c_j_per_k},
                  {"ambient_c", soc.thermal.ambient_c},
                  {"trip_c", soc.thermal.trip_c},
                  {"hysteresis_c", soc.thermal.hysteresis_c},
                  {"zones", zones}}},
                {"ondemand_thresholds", {{"low", soc.ondemand.low}, {"high", soc.ondemand.high}}}};
    if (soc.utilization_window_us) out["utilization_window_us"] = *soc.utilization_window_us;
    return out;
}

void PeRuntimeState::push_utilization_sample(double busy, double window) {
    utilization_samples.emplace_back(busy, window);
    if (utilization_samples.size() > kWindowSamples) utilization_samples.erase(utilization_samples.begin());
}

double PeRuntimeState::windowed_utilization() const {
    double busy = 0.0;
    double window = 0.0;
    for (const auto& [b, w] : utilization_samples) {
        busy += b;
        window += w;
    }
    return window > 0.0 ? std::clamp(busy / window, 0.0, 1.0) : 0.0;
}

void record_blocking_observation(PeRuntimeState& state, bool pe_busy) {
    ++state.blocking.total;
    if (pe_busy) ++state.blocking.busy;
}

} // namespace dssim::resource
