#pragma once

#include <dssim/app.hpp>
#include <dssim/resource.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dssim::sched {

/// One task in the ready queue, with everything a scheduler needs to cost
/// every PE. Vectors are indexed by PE position in the SoC config.
struct ReadyTask {
    JobId job = 0;
    TaskId task = 0;
    std::string app;
    std::string kind;
    SimTime job_arrival = 0;
    SimTime ready_time = 0;
    /// Execution time at the PE's current OPP; nullopt if unsupported.
    std::vector<std::optional<SimTime>> exec_ns;
    /// Latest predecessor finish plus communication delay to that PE.
    std::vector<SimTime> data_ready;
};

struct PeView {
    PeId id = 0;
    int capacity = 1;
    /// Running plus queued (assigned, not yet started) tasks.
    int load = 0;
    double windowed_utilization = 0.0;
    /// Estimated time each slot becomes free, never earlier than `now`.
    std::vector<SimTime> slot_available;
    int opp_index = 0;
};

struct SchedulingContext {
    SimTime now = 0;
    std::vector<ReadyTask> tasks;
    std::vector<PeView> pes;
};

struct Placement {
    JobId job = 0;
    TaskId task = 0;
    PeId pe = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

using Assignment = std::vector<Placement>;

/// Plug-in point: a scheduler is a deterministic function of its context.
/// Tasks it leaves unassigned stay in the ready queue for the next epoch.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual Assignment schedule(const SchedulingContext& ctx) const = 0;
    /// Load-time check against the applications a run will stream.
    virtual void validate(const std::vector<app::AppTemplate>& /*apps*/, const resource::SocConfig& /*soc*/) const {}
};

/// Minimum execution time, FIFO over (job, task). Ties among equally fast
/// PEs go to the most idle one: lowest load relative to capacity, then
/// lowest windowed utilization, then lowest PE id.
class MetScheduler final : public Scheduler {
public:
    [[nodiscard]] std::string name() const override { return "met"; }
    [[nodiscard]] Assignment schedule(const SchedulingContext& ctx) const override;
};

/// Earliest finish time greedy over all (task, PE) pairs.
class EtfScheduler final : public Scheduler {
public:
    [[nodiscard]] std::string name() const override { return "etf"; }
    [[nodiscard]] Assignment schedule(const SchedulingContext& ctx) const override;
};

/// app name -> (task id -> PE id).
struct ScheduleTable {
    std::map<std::string, std::map<TaskId, PeId>> entries;

    [[nodiscard]] nlohmann::json to_json() const;
    static ScheduleTable from_json(const nlohmann::json& j);
    static ScheduleTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    friend bool operator==(const ScheduleTable&, const ScheduleTable&) = default;
};

class TableScheduler final : public Scheduler {
public:
    explicit TableScheduler(ScheduleTable table) : table_(std::move(table)) {}
    [[nodiscard]] std::string name() const override { return "table"; }
    [[nodiscard]] Assignment schedule(const SchedulingContext& ctx) const override;
    /// Every task of every app must map to an existing PE supporting it.
    void validate(const std::vector<app::AppTemplate>& apps, const resource::SocConfig& soc) const override;
    [[nodiscard]] const ScheduleTable& table() const noexcept { return table_; }

private:
    ScheduleTable table_;
};

/// "met", "etf" or "table:<path>". ("oracle" needs the kernel; see oracle.hpp.)
[[nodiscard]] std::unique_ptr<Scheduler> make_scheduler(const std::string& selector);

} // namespace dssim::sched
