#pragma once

#include <dssim/core.hpp>
#include <dssim/resource.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dssim::metrics {

inline constexpr int kSchemaVersion = 1;

struct GanttRecord {
    JobId job = 0;
    TaskId task = 0;
    PeId pe = 0;
    int slot = 0;
    SimTime start = 0;
    SimTime end = 0;
    int opp = 0;
    /// When the task's inputs were all available on this PE.
    SimTime data_ready = 0;
};

struct JobRecord {
    JobId id = 0;
    std::string app;
    SimTime arrival = 0;
    std::optional<SimTime> completion;
};

struct PeStats {
    PeId id = 0;
    std::string name;
    std::string cluster;
    std::string subtype;
    int capacity = 1;
    /// Slot-nanoseconds spent executing.
    double busy_ns = 0.0;
    resource::BlockingCounters blocking;
    double energy_uj = 0.0;
    /// Busy slot-nanoseconds per task kind.
    std::map<std::string, double> busy_by_kind_ns;
};

struct TraceRow {
    SimTime time = 0;
    std::string pe_or_cluster;
    double dyn_w = 0.0;
    double static_w = 0.0;
    double temp_c = 0.0;
    int opp_index = 0;
};

struct EventRow {
    SimTime time = 0;
    std::string event;
    std::int64_t job = -1;
    std::int64_t task = -1;
    PeId pe = -1;
    int opp = -1;
};

/// Everything one simulation run produces.
struct MetricsLedger {
    std::vector<GanttRecord> gantt;
    std::vector<JobRecord> jobs;
    std::uint64_t injected = 0;
    std::uint64_t completed = 0;
    SimTime sim_end = 0;
    std::vector<PeStats> pes;
    double energy_dynamic_uj = 0.0;
    double energy_static_uj = 0.0;
    std::vector<TraceRow> traces;
    std::vector<EventRow> events;
    std::uint64_t dram_saturations = 0;
    double max_temperature_c = 0.0;
    std::uint64_t throttled_epochs = 0;
    /// Time integral of jobs in the system, ns * jobs.
    double jobs_in_system_ns = 0.0;

    [[nodiscard]] std::uint64_t in_flight() const noexcept { return injected - completed; }
    [[nodiscard]] double energy_uj() const noexcept { return energy_dynamic_uj + energy_static_uj; }
    [[nodiscard]] std::vector<double> latencies_us() const;
};

struct Summary {
    std::uint64_t jobs_injected = 0;
    std::uint64_t jobs_completed = 0;
    std::uint64_t jobs_in_flight = 0;
    double sim_time_us = 0.0;
    std::optional<double> avg_latency_us;
    double throughput_jobs_per_ms = 0.0;
    double energy_uj = 0.0;
    double avg_power_w = 0.0;
    std::optional<double> energy_per_job_uj;
    /// Total energy (mJ) times average job latency (ms).
    std::optional<double> edp_mj_ms;
    /// Throughput (jobs/ms) per watt of average power.
    std::optional<double> ppw;
    /// Energy per job (uJ) times area (mm^2).
    std::optional<double> eap;
    std::optional<double> area_mm2;
    double max_temperature_c = 0.0;
    std::uint64_t dram_saturations = 0;
    std::map<std::string, double> utilization;
    std::map<std::string, double> blocking;

    friend bool operator==(const Summary&, const Summary&) = default;
};

[[nodiscard]] Summary summarize(const MetricsLedger& ledger, std::optional<double> area_mm2 = std::nullopt);
[[nodiscard]] double utilization(const MetricsLedger& ledger, const PeStats& pe);

/// (utilization, blocking) of one cluster, both fractions, aggregated over its PEs.
struct ClusterPlane {
    std::string cluster;
    double utilization = 0.0;
    double blocking = 0.0;
    std::map<std::string, double> busy_by_kind_ns;
};
[[nodiscard]] std::vector<ClusterPlane> cluster_plane(const MetricsLedger& ledger);

[[nodiscard]] nlohmann::json to_json(const Summary& s);
[[nodiscard]] Summary summary_from_json(const nlohmann::json& j);

/// Non-dominated subset minimizing both coordinates; ordered by the first
/// coordinate, then the second. Duplicates collapse to one point. Returns
/// indices into `points`.
[[nodiscard]] std::vector<std::size_t> pareto_frontier(const std::vector<std::pair<double, double>>& points);

struct Bin {
    double lower = 0.0;
    std::uint64_t count = 0;
};
/// Half-open bins [k*w, (k+1)*w) from the lowest occupied bin to the highest.
[[nodiscard]] std::vector<Bin> histogram(const std::vector<double>& values, double bin_width);

/// Writes gantt.csv, summary.json and traces.csv into `dir`.
void export_run(const MetricsLedger& ledger, const Summary& summary, const std::filesystem::path& dir);
void write_gantt_csv(const MetricsLedger& ledger, const std::filesystem::path& path);
void write_traces_csv(const MetricsLedger& ledger, const std::filesystem::path& path);
void write_events_csv(const MetricsLedger& ledger, const std::filesystem::path& path);
void write_summary_json(const Summary& summary, const std::filesystem::path& path);
[[nodiscard]] Summary read_summary_json(const std::filesystem::path& path);

/// Fixed-precision decimal used by every CSV writer.
[[nodiscard]] std::string fmt(double v, int precision = 3);

} // namespace dssim::metrics
