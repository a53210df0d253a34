#pragma once

#include <dssim/app.hpp>
#include <dssim/metrics.hpp>
#include <dssim/resource.hpp>
#include <dssim/scheduler.hpp>
#include <dssim/workload.hpp>

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace dssim::kernel {

/// Per-job task life cycle: Outstanding -> Ready -> Executable -> Running -> Completed.
enum class TaskState : std::uint8_t { Outstanding, Ready, Executable, Running, Completed };

/// Queue bookkeeping for one job instance.
class QueueSet {
public:
    explicit QueueSet(const app::AppTemplate& graph);

    /// Entry tasks are ready on construction.
    [[nodiscard]] const std::vector<TaskId>& initially_ready() const noexcept { return initial_; }
    [[nodiscard]] TaskState state(TaskId t) const { return state_.at(t); }
    void mark_executable(TaskId t);
    void mark_running(TaskId t);

    /// Retires `t` and returns the successors that just became ready, in
    /// ascending id order.
    std::vector<TaskId> promote_ready(TaskId t);

    [[nodiscard]] std::size_t completed() const noexcept { return completed_; }
    [[nodiscard]] bool done() const noexcept { return completed_ == state_.size(); }
    [[nodiscard]] std::size_t count(TaskState s) const;

private:
    const app::AppTemplate* graph_;
    std::vector<TaskState> state_;
    std::vector<std::uint32_t> waiting_;
    std::vector<TaskId> initial_;
    std::size_t completed_ = 0;
};

/// 0 on the same PE; otherwise volume / bandwidth + NoC latency at `load`.
/// Returned in nanoseconds.
[[nodiscard]] SimTime communication_delay(double volume_bytes, PeId src_pe, PeId dst_pe, double noc_load,
                                          const resource::NocModel& noc);

/// Outstanding memory traffic over a trailing window.
class MemorySlidingWindow {
public:
    explicit MemorySlidingWindow(double window_us) : window_ns_(us_to_ns(window_us)) {}

    void add(SimTime t, double bytes);
    void evict(SimTime now);
    [[nodiscard]] double bytes() const noexcept { return bytes_; }
    /// GB/s over the window at `now` (evicts first).
    [[nodiscard]] double bandwidth_gbps(SimTime now);
    [[nodiscard]] std::size_t records() const noexcept { return records_.size(); }

private:
    SimTime window_ns_;
    std::deque<std::pair<SimTime, double>> records_;
    double bytes_ = 0.0;
};

/// DRAM penalty in ns for a task starting at `now`. Bumps `saturations` past the last knot.
[[nodiscard]] SimTime memory_latency(MemorySlidingWindow& window, SimTime now, const resource::DramModel& dram,
                                     std::uint64_t* saturations = nullptr);

struct RunOptions {
    bool record_gantt = true;
    bool record_traces = true;
    bool record_events = false;
};

/// One explicitly timed job, for single-job and replay runs.
struct JobSpec {
    std::size_t app_index = 0;
    SimTime arrival = 0;
};

/// Streams the workload through the SoC until its stopping condition.
[[nodiscard]] metrics::MetricsLedger run(const resource::SocConfig& soc, const workload::WorkloadSpec& workload,
                                         const sched::Scheduler& scheduler, const RunOptions& options = {});

/// Runs a fixed list of jobs (arrival order) built from `apps`; ends at the last completion.
[[nodiscard]] metrics::MetricsLedger run_jobs(const resource::SocConfig& soc,
                                              const std::vector<app::AppTemplate>& apps,
                                              const std::vector<JobSpec>& jobs, const sched::Scheduler& scheduler,
                                              const RunOptions& options = {});

/// Makespan of one job of `graph` arriving at t = 0.
[[nodiscard]] SimTime single_job_makespan(const resource::SocConfig& soc, const app::AppTemplate& graph,
                                          const sched::Scheduler& scheduler,
                                          metrics::MetricsLedger* ledger_out = nullptr);

} // namespace dssim::kernel
