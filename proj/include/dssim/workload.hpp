#pragma once

#include <dssim/app.hpp>
#include <dssim/core.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dssim::workload {

enum class Distribution { Exponential, Fixed };

struct WorkloadSpec {
    /// (application name, probability), in declaration order.
    std::vector<std::pair<std::string, double>> mixture;
    double rate_jobs_per_ms = 1.0;
    std::optional<std::uint64_t> jobs;
    std::optional<double> duration_us;
    std::uint64_t seed = 1;
    Distribution distribution = Distribution::Exponential;
    app::BenchmarkParams params;
};

void validate(const WorkloadSpec& spec);
[[nodiscard]] WorkloadSpec workload_from_json(const nlohmann::json& j);
[[nodiscard]] WorkloadSpec load_workload(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const WorkloadSpec& spec);

/// Scheduler case-study mixtures: "fig11a" .. "fig11d". Rate, seed and
/// stopping condition are defaults the caller is expected to override.
[[nodiscard]] WorkloadSpec mixture_for_study(const std::string& study);

/// Builds the templates named in the mixture, in mixture order.
[[nodiscard]] std::vector<app::AppTemplate> build_templates(const WorkloadSpec& spec);

/// A 64-bit Mersenne Twister stream. Independent streams are derived from
/// one seed with std::seed_seq{seed_lo, seed_hi, stream_id}.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint32_t stream_id);
    /// Uniform on [0, 1) with 53 bits of precision.
    double uniform();
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Inter-arrival law. Implementations draw from the stream they are handed.
class ArrivalDistribution {
public:
    virtual ~ArrivalDistribution() = default;
    virtual double sample_us(RngStream& rng) = 0;
};

class ExponentialArrivals final : public ArrivalDistribution {
public:
    explicit ExponentialArrivals(double rate_jobs_per_ms) : mean_us_(1000.0 / rate_jobs_per_ms) {}
    double sample_us(RngStream& rng) override;

private:
    double mean_us_;
};

class FixedArrivals final : public ArrivalDistribution {
public:
    explicit FixedArrivals(double rate_jobs_per_ms) : interval_us_(1000.0 / rate_jobs_per_ms) {}
    double sample_us(RngStream&) override { return interval_us_; }

private:
    double interval_us_;
};

struct Arrival {
    JobId job_id = 0;
    std::size_t app_index = 0;
    SimTime time = 0;
    double interarrival_us = 0.0;
};

/// Streams arrivals until the stopping condition is met. The first job
/// arrives one inter-arrival time after t = 0.
class JobGenerator {
public:
    explicit JobGenerator(const WorkloadSpec& spec);
    [[nodiscard]] std::optional<Arrival> next();

private:
    std::size_t pick_app();

    std::vector<double> cumulative_;
    std::optional<std::uint64_t> job_limit_;
    std::optional<SimTime> time_limit_;
    std::unique_ptr<ArrivalDistribution> distribution_;
    RngStream interarrival_rng_;
    RngStream mixture_rng_;
    JobId next_id_ = 0;
    SimTime clock_ = 0;
};

} // namespace dssim::workload
