#pragma once

#include <dssim/metrics.hpp>
#include <dssim/resource.hpp>
#include <dssim/workload.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dssim::dse {

/// uncore + sum(pe.area) * packing_factor.
[[nodiscard]] double area_model(const resource::SocConfig& soc, double packing_factor = 1.0);

/// Thread count for parallel sweeps: DSSIM_THREADS if set, else the OpenMP default.
[[nodiscard]] int thread_count();

/// An accelerator (or core) kind the search may instantiate.
struct Candidate {
    std::string subtype;
    resource::PeDescriptor tmpl;
    int max_count = 8;
};

/// Copy of `base` with exactly counts[subtype] PEs of each listed subtype.
/// Extra PEs are cloned from an existing PE of that subtype or from the
/// matching candidate template; ids are renumbered densely.
[[nodiscard]] resource::SocConfig with_counts(const resource::SocConfig& base,
                                              const std::map<std::string, int>& counts,
                                              const std::vector<Candidate>& templates = {});
[[nodiscard]] std::map<std::string, int> subtype_counts(const resource::SocConfig& soc);

struct GridCell {
    std::string name;
    resource::SocConfig soc;
};

struct GridSpec {
    std::vector<GridCell> cells;
    workload::WorkloadSpec workload;
    std::string scheduler = "etf";
    int seeds = 1;
    double packing_factor = 1.0;
};

/// Reads grid.json. Paths inside are relative to the file. Cells come from
/// an explicit "cells" list, an "axes" cross product over subtype counts, or
/// a "dvfs" sweep.
[[nodiscard]] GridSpec load_grid_spec(const std::filesystem::path& path);
[[nodiscard]] std::vector<Candidate> load_candidates(const std::filesystem::path& path);

struct CellResult {
    std::size_t index = 0;
    std::string name;
    double area_mm2 = 0.0;
    std::optional<double> avg_latency_us;
    std::optional<double> energy_per_job_uj;
    std::optional<double> edp_mj_ms;
    std::optional<double> eap;
    double avg_power_w = 0.0;
    std::uint64_t completed = 0;
    std::string error;

    friend bool operator==(const CellResult&, const CellResult&) = default;
};

/// One result per cell in cell order. A failing cell records its error and
/// the others still run. Cells are distributed over OpenMP threads.
[[nodiscard]] std::vector<CellResult> grid_search(const GridSpec& spec);
/// Same results, one cell after another.
[[nodiscard]] std::vector<CellResult> grid_search_serial(const GridSpec& spec);
[[nodiscard]] CellResult evaluate_cell(const GridSpec& spec, std::size_t index);

/// Indices of results on the (area, energy/job) frontier; failed cells are skipped.
[[nodiscard]] std::vector<std::size_t> grid_pareto(const std::vector<CellResult>& results);

void write_grid_results(const std::vector<CellResult>& results, const std::filesystem::path& path);
void write_pareto(const std::vector<CellResult>& results, const std::vector<std::size_t>& frontier,
                  const std::filesystem::path& path);

struct DvfsSweep {
    /// Every (big OPP, LITTLE OPP, active big, active LITTLE) combination
    /// with fixed OPPs, then the ondemand, powersave and performance governors.
    bool include_governors = true;
    int min_big = 1;
    int min_little = 1;
    std::string big_cluster = "big";
    std::string little_cluster = "little";
};
[[nodiscard]] std::vector<GridCell> dvfs_cells(const resource::SocConfig& base, const DvfsSweep& sweep = {});

struct PlanePoint {
    std::string cluster;
    double utilization_pct = 0.0;
    double blocking_pct = 0.0;
};

struct GuidedSpec {
    resource::SocConfig base;
    std::vector<Candidate> candidates;
    workload::WorkloadSpec workload;
    std::string scheduler = "etf";
    double utilization_threshold = 0.60;
    double blocking_threshold = 0.30;
    int budget = 10;
    double packing_factor = 1.0;
};

struct GuidedStep {
    int iteration = 0;
    std::map<std::string, int> counts;
    double area_mm2 = 0.0;
    std::optional<double> avg_latency_us;
    std::optional<double> energy_per_job_uj;
    std::vector<PlanePoint> plane;
    std::vector<std::string> upper_right;
    std::vector<std::string> upper_left;
    std::vector<std::string> frozen;
    std::string action;
};

struct GuidedResult {
    resource::SocConfig recommended;
    std::map<std::string, int> counts;
    std::vector<GuidedStep> trace;
    std::string stop_reason;
};

[[nodiscard]] GuidedResult guided_search(const GuidedSpec& spec);
[[nodiscard]] nlohmann::json to_json(const GuidedResult& r);

/// Utilization and blocking thresholds and budget come from candidates.json.
[[nodiscard]] GuidedSpec load_guided_spec(const std::filesystem::path& base_soc,
                                          const std::filesystem::path& candidates,
                                          const std::filesystem::path& workload);

} // namespace dssim::dse
