#pragma once

#include <dssim/app.hpp>
#include <dssim/resource.hpp>
#include <dssim/scheduler.hpp>

#include <cstdint>
#include <memory>
#include <vector>

namespace dssim::sched {

struct OracleLimits {
    std::size_t max_tasks = 12;
    std::size_t max_pes = 4;
};

struct OracleResult {
    ScheduleTable table;
    SimTime makespan = 0;
    std::uint64_t evaluated = 0;
    /// True when the result came from exhaustive enumeration.
    bool exhaustive = false;
};

/// Enumerates every task -> supporting-PE assignment of one job arriving at
/// t = 0, simulating each, and keeps the lexicographically first minimum.
/// Throws ConfigError when the instance is over `limits`. Cells are split
/// across OpenMP threads; the result is identical to the serial version.
[[nodiscard]] OracleResult oracle_optimal_table(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                                const OracleLimits& limits = {});
[[nodiscard]] OracleResult oracle_optimal_table_serial(const app::AppTemplate& graph,
                                                       const resource::SocConfig& soc,
                                                       const OracleLimits& limits = {});

/// Number of assignments the exhaustive oracle would simulate.
[[nodiscard]] std::uint64_t assignment_space(const app::AppTemplate& graph, const resource::SocConfig& soc);

/// Decodes assignment `index` (task 0 most significant) into a PE index per task.
[[nodiscard]] std::vector<std::size_t> decode_assignment(std::uint64_t index,
                                                         const std::vector<std::vector<std::size_t>>& candidates);

struct SearchOptions {
    std::uint64_t max_evaluations = 2000;
};

/// For instances too large to enumerate: starts from the better of the MET
/// and ETF single-job mappings and applies single-task moves while they
/// shorten the makespan. Never worse than either seed.
[[nodiscard]] OracleResult table_search(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                        const SearchOptions& options = {});

/// Exhaustive when within limits, table_search otherwise.
[[nodiscard]] OracleResult best_table(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                      const OracleLimits& limits = {}, const SearchOptions& options = {});

/// Table scheduler holding best_table() for every application.
[[nodiscard]] std::unique_ptr<TableScheduler> make_oracle_scheduler(const std::vector<app::AppTemplate>& apps,
                                                                    const resource::SocConfig& soc);

/// Any --scheduler selector: met, etf, table:<path> or oracle (tables built for `apps` on `soc`).
[[nodiscard]] std::unique_ptr<Scheduler> make_scheduler_for(const std::string& selector,
                                                            const std::vector<app::AppTemplate>& apps,
                                                            const resource::SocConfig& soc);

/// The mapping a scheduler produces for one job of `graph` at t = 0.
[[nodiscard]] std::map<TaskId, PeId> single_job_mapping(const app::AppTemplate& graph,
                                                        const resource::SocConfig& soc, const Scheduler& scheduler);

} // namespace dssim::sched
