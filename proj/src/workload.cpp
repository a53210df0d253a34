#include <dssim/workload.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dssim::workload {

using nlohmann::json;

void validate(const WorkloadSpec& spec) {
    if (spec.mixture.empty()) throw ConfigError("workload: mixture is empty");
    double sum = 0.0;
    for (const auto& [name, p] : spec.mixture) {
        if (!(p >= 0.0)) throw ConfigError("workload: probability of '" + name + "' must be >= 0");
        const bool known = name == "canonical" || std::find(app::kBenchmarkNames.begin(), app::kBenchmarkNames.end(),
                                                            name) != app::kBenchmarkNames.end();
        if (!known) throw ConfigError("workload: unknown application '" + name + "'");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("workload: mixture probabilities must sum to 1");
    if (!(spec.rate_jobs_per_ms > 0.0)) throw ConfigError("workload: rate_jobs_per_ms must be positive");
    if (spec.jobs.has_value() == spec.duration_us.has_value()) {
        throw ConfigError("workload: set exactly one of 'jobs' or 'duration_us'");
    }
    if (spec.duration_us && !(*spec.duration_us >= 0.0)) throw ConfigError("workload: duration_us must be >= 0");
}

WorkloadSpec workload_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("workload: expected an object");
    for (const auto& [key, _] : j.items()) {
        static const std::vector<std::string> allowed = {"mixture", "rate_jobs_per_ms", "jobs", "duration_us",
                                                         "seed", "distribution", "app_params"};
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("workload: unknown key '" + key + "'");
        }
    }
    WorkloadSpec spec;
    try {
        for (const auto& [name, p] : j.at("mixture").items()) spec.mixture.emplace_back(name, p.get<double>());
        spec.rate_jobs_per_ms = j.at("rate_jobs_per_ms").get<double>();
        if (j.contains("jobs")) spec.jobs = j["jobs"].get<std::uint64_t>();
        if (j.contains("duration_us")) spec.duration_us = j["duration_us"].get<double>();
        spec.seed = j.value("seed", std::uint64_t{1});
        const auto dist = j.value("distribution", std::string("exponential"));
        if (dist == "exponential") {
            spec.distribution = Distribution::Exponential;
        } else if (dist == "fixed") {
            spec.distribution = Distribution::Fixed;
        } else {
            throw ConfigError("workload: unknown distribution '" + dist + "'");
        }
        if (j.contains("app_params")) {
            const auto& a = j["app_params"];
            auto& p = spec.params;
            for (const auto& [key, _] : a.items()) {
                static const std::vector<std::string> allowed = {"wifi_chains", "pd_signals", "pd_samples",
                                                                 "wifi_edge_bytes", "radar_edge_bytes",
                                                                 "pd_edge_bytes", "sc_edge_bytes"};
                if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                    throw ConfigError("workload.app_params: unknown key '" + key + "'");
                }
            }
            p.wifi_chains = a.value("wifi_chains", p.wifi_chains);
            p.pd_signals = a.value("pd_signals", p.pd_signals);
            p.pd_samples = a.value("pd_samples", p.pd_samples);
            p.wifi_edge_bytes = a.value("wifi_edge_bytes", p.wifi_edge_bytes);
            p.radar_edge_bytes = a.value("radar_edge_bytes", p.radar_edge_bytes);
            p.pd_edge_bytes = a.value("pd_edge_bytes", p.pd_edge_bytes);
            p.sc_edge_bytes = a.value("sc_edge_bytes", p.sc_edge_bytes);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("workload: ") + e.what());
    }
    validate(spec);
    return spec;
}

WorkloadSpec load_workload(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open workload " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed workload " + path.string() + ": " + e.what());
    }
    return workload_from_json(j);
}

json to_json(const WorkloadSpec& spec) {
    json mixture = json::object();
    for (const auto& [name, p] : spec.mixture) mixture[name] = p;
    json out = {{"mixture", mixture},
                {"rate_jobs_per_ms", spec.rate_jobs_per_ms},
                {"seed", spec.seed},
                {"distribution", spec.distribution == Distribution::Fixed ? "fixed" : "exponential"},
                {"app_params",
                 {{"wifi_chains", spec.params.wifi_chains},
                  {"pd_signals", spec.params.pd_signals},
                  {"pd_samples", spec.params.pd_samples},
                  {"wifi_edge_bytes", spec.params.wifi_edge_bytes},
                  {"radar_edge_bytes", spec.params.radar_edge_bytes},
                  {"pd_edge_bytes", spec.params.pd_edge_bytes},
                  {"sc_edge_bytes", spec.params.sc_edge_bytes}}}};
    if (spec.jobs) out["jobs"] = *spec.jobs;
    if (spec.duration_us) out["duration_us"] = *spec.duration_us;
    return out;
}

WorkloadSpec mixture_for_study(const std::string& study) {
    WorkloadSpec spec;
    if (study == "fig11a") {
        spec.mixture = {{"wifi-tx", 0.2}, {"wifi-rx", 0.8}};
    } else if (study == "fig11b") {
        spec.mixture = {{"wifi-tx", 0.8}, {"wifi-rx", 0.2}};
    } else if (study == "fig11c") {
        spec.mixture = {{"range-detection", 0.8}, {"pulse-doppler", 0.2}};
    } else if (study == "fig11d") {
        spec.mixture = {{"wifi-tx", 0.3}, {"wifi-rx", 0.3}, {"range-detection", 0.3}, {"pulse-doppler", 0.1}};
    } else {
        throw ConfigError("unknown study '" + study + "' (fig11a|fig11b|fig11c|fig11d)");
    }
    spec.jobs = 1000;
    return spec;
}

std::vector<app::AppTemplate> build_templates(const WorkloadSpec& spec) {
    std::vector<app::AppTemplate> out;
    out.reserve(spec.mixture.size());
    for (const auto& [name, _] : spec.mixture) out.push_back(app::build_benchmark(name, spec.params));
    return out;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      stream_id};
    engine_.seed(seq);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double ExponentialArrivals::sample_us(RngStream& rng) { return -mean_us_ * std::log1p(-rng.uniform()); }

JobGenerator::JobGenerator(const WorkloadSpec& spec)
    : interarrival_rng_(spec.seed, 0), mixture_rng_(spec.seed, 1) {
    validate(spec);
    double acc = 0.0;
    for (const auto& [_, p] : spec.mixture) {
        acc += p;
        cumulative_.push_back(acc);
    }
    job_limit_ = spec.jobs;
    if (spec.duration_us) time_limit_ = us_to_ns(*spec.duration_us);
    if (spec.distribution == Distribution::Fixed) {
        distribution_ = std::make_unique<FixedArrivals>(spec.rate_jobs_per_ms);
    } else {
        distribution_ = std::make_unique<ExponentialArrivals>(spec.rate_jobs_per_ms);
    }
}

std::size_t JobGenerator::pick_app() {
    const double u = mixture_rng_.uniform() * cumulative_.back();
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        if (u < cumulative_[i]) return i;
    }
    return cumulative_.size() - 1;
}

std::optional<Arrival> JobGenerator::next() {
    if (job_limit_ && next_id_ >= *job_limit_) return std::nullopt;
    const double gap = distribution_->sample_us(interarrival_rng_);
    const SimTime t = clock_ + us_to_ns(gap);
    if (time_limit_ && t > *time_limit_) return std::nullopt;
    clock_ = t;
    Arrival a{next_id_++, pick_app(), t, gap};
    return a;
}

} // namespace dssim::workload
