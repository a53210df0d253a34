#include <dssim/kernel.hpp>

#include <dssim/power.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

namespace dssim::kernel {

QueueSet::QueueSet(const app::AppTemplate& graph)
    : graph_(&graph), state_(graph.size(), TaskState::Outstanding), waiting_(graph.size(), 0) {
    for (const auto& n : graph.nodes()) {
        waiting_[n.id] = static_cast<std::uint32_t>(n.predecessors.size());
        if (n.predecessors.empty()) {
            state_[n.id] = TaskState::Ready;
            initial_.push_back(n.id);
        }
    }
}

void QueueSet::mark_executable(TaskId t) {
    if (state_.at(t) != TaskState::Ready) throw SimulationError("task " + std::to_string(t) + " is not ready");
    state_[t] = TaskState::Executable;
}

void QueueSet::mark_running(TaskId t) {
    if (state_.at(t) != TaskState::Executable) {
        throw SimulationError("task " + std::to_string(t) + " is not executable");
    }
    state_[t] = TaskState::Running;
}

std::vector<TaskId> QueueSet::promote_ready(TaskId t) {
    if (state_.at(t) == TaskState::Completed) throw SimulationError("task " + std::to_string(t) + " completed twice");
    state_[t] = TaskState::Completed;
    ++completed_;
    std::vector<TaskId> out;
    for (TaskId s : graph_->node(t).successors) {
        if (--waiting_[s] == 0) {
            state_[s] = TaskState::Ready;
            out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t QueueSet::count(TaskState s) const {
    return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

SimTime communication_delay(double volume_bytes, PeId src_pe, PeId dst_pe, double noc_load,
                            const resource::NocModel& noc) {
    if (src_pe == dst_pe) return 0;
    const double us = volume_bytes / noc.bandwidth_bytes_per_us + noc.load_latency_us(noc_load);
    return us_to_ns(us);
}

void MemorySlidingWindow::add(SimTime t, double bytes) {
    if (bytes <= 0.0) return;
    records_.emplace_back(t, bytes);
    bytes_ += bytes;
}

void MemorySlidingWindow::evict(SimTime now) {
    while (!records_.empty() && records_.front().first + window_ns_ <= now) {
        bytes_ -= records_.front().second;
        records_.pop_front();
    }
    if (records_.empty()) bytes_ = 0.0;
}

double MemorySlidingWindow::bandwidth_gbps(SimTime now) {
    evict(now);
    if (window_ns_ == 0) return 0.0;
    // bytes per ns is GB/s.
    return bytes_ / static_cast<double>(window_ns_);
}

SimTime memory_latency(MemorySlidingWindow& window, SimTime now, const resource::DramModel& dram,
                       std::uint64_t* saturations) {
    bool saturated = false;
    const double ns = dram.bandwidth_latency_ns(window.bandwidth_gbps(now), &saturated);
    if (saturated && saturations) ++*saturations;
    return static_cast<SimTime>(std::llround(std::max(0.0, ns)));
}

namespace {

enum class EvKind : std::uint8_t { Finish = 0, Dtpm = 1, Arrival = 2, Wake = 3, End = 4 };

struct Event {
    SimTime time = 0;
    EvKind kind = EvKind::Wake;
    JobId job = 0;
    TaskId task = 0;
    std::uint64_t seq = 0;
    int pe = -1;
    int slot = -1;
    std::uint64_t generation = 0;
    std::size_t app_index = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.kind, a.job, a.task, a.seq) > std::tie(b.time, b.kind, b.job, b.task, b.seq);
    }
};

struct TaskRun {
    int pe = -1;
    SimTime ready = 0;
    SimTime data_ready = 0;
    SimTime start = 0;
    SimTime finish = 0;
};

struct JobState {
    std::size_t app = 0;
    SimTime arrival = 0;
    QueueSet queues;
    std::vector<TaskRun> tasks;
    std::size_t remaining = 0;

    JobState(std::size_t app_index, SimTime t, const app::AppTemplate& g)
        : app(app_index), arrival(t), queues(g), tasks(g.size()), remaining(g.size()) {}
};

struct Slot {
    bool busy = false;
    JobId job = 0;
    TaskId task = 0;
    int kind = 0;
    int opp = 0;
    SimTime start = 0;
    SimTime seg_start = 0;
    double remaining_ref_ns = 0.0;
    SimTime mem_left = 0;
    SimTime finish = 0;
    std::uint64_t generation = 0;
};

using ExecKey = std::tuple<SimTime, JobId, TaskId>;

struct PeRun {
    resource::PeRuntimeState st;
    std::vector<Slot> slots;
    std::set<ExecKey> exec;
    std::vector<SimTime> est_free;
    std::size_t zone = 0;
    double busy_epoch_ns = 0.0;
    double dyn_epoch_uj = 0.0;
    double static_epoch_uj = 0.0;
    std::vector<double> busy_by_kind;
    SimTime wake_at = std::numeric_limits<SimTime>::max();
};

using ArrivalSource = std::function<std::optional<workload::Arrival>()>;

class Kernel {
public:
    Kernel(const resource::SocConfig& soc, const std::vector<app::AppTemplate>& apps,
           const sched::Scheduler& scheduler, const RunOptions& options, ArrivalSource source,
           std::optional<SimTime> end_time)
        : soc_(soc), apps_(apps), scheduler_(scheduler), options_(options), source_(std::move(source)),
          end_time_(end_time), window_(soc.dram.window_us) {
        scheduler_.validate(apps_, soc_);
        for (const auto& a : apps_) {
            std::vector<int> ids;
            for (const auto& n : a.nodes()) {
                auto [it, inserted] = kind_index_.try_emplace(n.kind, static_cast<int>(kind_names_.size()));
                if (inserted) kind_names_.push_back(n.kind);
                ids.push_back(it->second);
            }
            app_kinds_.push_back(std::move(ids));
        }
        const auto zones = soc_.thermal_zones();
        for (const auto& z : zones) {
            zone_models_.push_back(power::ThermalModel::for_zone(soc_.thermal, z));
            zone_states_.push_back({soc_.thermal.ambient_c, false});
        }
        zone_names_ = zones;
        pes_.resize(soc_.pes.size());
        for (std::size_t p = 0; p < soc_.pes.size(); ++p) {
            const auto& d = soc_.pes[p];
            auto& r = pes_[p];
            r.st.current_opp = power::initial_opp(d.dvfs_policy, d.max_opp_index());
            r.slots.resize(static_cast<std::size_t>(d.capacity));
            r.est_free.assign(static_cast<std::size_t>(d.capacity), 0);
            r.zone = static_cast<std::size_t>(
                std::find(zones.begin(), zones.end(), d.thermal_zone()) - zones.begin());
            r.busy_by_kind.assign(kind_names_.size(), 0.0);
            // Candidate PEs per kind, in config order.
            for (std::size_t k = 0; k < kind_names_.size(); ++k) {
                if (d.supports(kind_names_[k])) candidates_[k].push_back(p);
            }
        }
        ledger_.max_temperature_c = soc_.thermal.ambient_c;
    }

    metrics::MetricsLedger run() {
        pull_arrival();
        if (end_time_) push({*end_time_, EvKind::End});
        if (pending_work()) push({epoch_ns(), EvKind::Dtpm});

        while (!events_.empty()) {
            const SimTime t = events_.top().time;
            if (t < now_) throw SimulationError("event time went backwards");
            advance(t);
            bool stop = false;
            while (!events_.empty() && events_.top().time == t) {
                Event ev = events_.top();
                events_.pop();
                if (progresses(ev.kind)) --progress_events_;
                stop = handle(ev) || stop;
            }
            if (stop) break;
            observe_blocking();
            schedule_ready();
            dispatch();
            if (!end_time_ && !pending_work()) break;
            if (!end_time_ && progress_events_ == 0 && !ready_.empty()) break;
        }
        if (!ready_.empty() && !end_time_ && progress_events_ == 0) {
            throw SimulationError("scheduler left " + std::to_string(ready_.size()) +
                                  " ready task(s) unassigned with nothing left to run");
        }
        finalize();
        return std::move(ledger_);
    }

private:
    [[nodiscard]] SimTime epoch_ns() const { return std::max<SimTime>(1, us_to_ns(soc_.dtpm_epoch_us)); }
    [[nodiscard]] bool pending_work() const { return !source_done_ || in_flight_ > 0; }

    [[nodiscard]] static bool progresses(EvKind k) { return k != EvKind::Dtpm && k != EvKind::End; }

    void push(Event ev) {
        ev.seq = seq_++;
        if (progresses(ev.kind)) ++progress_events_;
        events_.push(ev);
    }

    void log_event(const char* what, std::int64_t job, std::int64_t task, int pe, int opp) {
        if (options_.record_events) ledger_.events.push_back({now_, what, job, task, pe, opp});
    }

    void pull_arrival() {
        if (source_done_) return;
        auto a = source_();
        if (!a) {
            source_done_ = true;
            return;
        }
        Event ev{a->time, EvKind::Arrival};
        ev.job = a->job_id;
        ev.app_index = a->app_index;
        push(ev);
    }

    void advance(SimTime t) {
        if (t == now_) return;
        const double dt_ns = static_cast<double>(t - now_);
        const double dt_us = dt_ns / static_cast<double>(kNsPerUs);
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            const auto& d = soc_.pes[p];
            auto& r = pes_[p];
            const auto& opp = d.opps[static_cast<std::size_t>(r.st.current_opp)];
            const double frac = static_cast<double>(r.st.busy_slots) / static_cast<double>(d.capacity);
            const double dyn = power::dynamic_power(d, opp, frac) * dt_us;
            const double stat = power::static_power(d, opp, zone_states_[r.zone].temperature_c) * dt_us;
            r.dyn_epoch_uj += dyn;
            r.static_epoch_uj += stat;
            ledger_.energy_dynamic_uj += dyn;
            ledger_.energy_static_uj += stat;
            pe_energy_[p] += dyn + stat;
            if (r.st.busy_slots > 0) {
                const double busy = static_cast<double>(r.st.busy_slots) * dt_ns;
                r.busy_epoch_ns += busy;
                pe_busy_[p] += busy;
                for (const auto& s : r.slots) {
                    if (s.busy) r.busy_by_kind[static_cast<std::size_t>(s.kind)] += dt_ns;
                }
            }
        }
        ledger_.jobs_in_system_ns += static_cast<double>(in_flight_) * dt_ns;
        now_ = t;
    }

    bool handle(const Event& ev) {
        switch (ev.kind) {
        case EvKind::Finish: on_finish(ev); return false;
        case EvKind::Dtpm: on_epoch(); return false;
        case EvKind::Arrival: on_arrival(ev); return false;
        case EvKind::Wake: return false;
        case EvKind::End: log_event("end", -1, -1, -1, -1); return true;
        }
        return false;
    }

    void on_arrival(const Event& ev) {
        if (ev.job != jobs_.size()) throw SimulationError("job ids must be dense and ordered");
        const auto& g = apps_.at(ev.app_index);
        jobs_.push_back(std::make_unique<JobState>(ev.app_index, now_, g));
        ledger_.jobs.push_back({ev.job, g.name(), now_, std::nullopt});
        ++ledger_.injected;
        ++in_flight_;
        log_event("arrival", ev.job, -1, -1, -1);
        auto& job = *jobs_.back();
        for (TaskId t : job.queues.initially_ready()) make_ready(ev.job, t);
        if (g.size() == 0) complete_job(ev.job);
        pull_arrival();
    }

    void make_ready(JobId j, TaskId t) {
        jobs_[j]->tasks[t].ready = now_;
        ready_.emplace_back(j, t);
        newly_ready_.emplace_back(j, t);
    }

    void complete_job(JobId j) {
        ledger_.jobs[j].completion = now_;
        ++ledger_.completed;
        --in_flight_;
        jobs_[j].reset();
    }

    void on_finish(const Event& ev) {
        auto& r = pes_[static_cast<std::size_t>(ev.pe)];
        auto& s = r.slots[static_cast<std::size_t>(ev.slot)];
        if (!s.busy || s.generation != ev.generation) return;  // stale after an OPP change
        s.busy = false;
        --r.st.busy_slots;

        auto& job = *jobs_[s.job];
        auto& tr = job.tasks[s.task];
        tr.finish = now_;
        const auto& g = apps_[job.app];
        window_.add(now_, g.output_bytes(s.task));
        if (options_.record_gantt) {
            ledger_.gantt.push_back(
                {s.job, s.task, soc_.pes[static_cast<std::size_t>(ev.pe)].id, ev.slot, s.start, now_, s.opp,
                 tr.data_ready});
        }
        log_event("finish", s.job, s.task, soc_.pes[static_cast<std::size_t>(ev.pe)].id, s.opp);

        if (r.st.busy_slots == 0 && r.exec.empty()) std::fill(r.est_free.begin(), r.est_free.end(), now_);

        const JobId jid = s.job;
        for (TaskId succ : job.queues.promote_ready(s.task)) make_ready(jid, succ);
        if (--job.remaining == 0) complete_job(jid);
    }

    void on_epoch() {
        const double epoch_ns_len = static_cast<double>(now_ - last_epoch_);
        if (epoch_ns_len <= 0.0) return;
        const double epoch_us = epoch_ns_len / static_cast<double>(kNsPerUs);
        std::vector<double> zone_power(zone_states_.size(), 0.0);
        std::vector<double> util(pes_.size(), 0.0);
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            auto& r = pes_[p];
            const double cap = static_cast<double>(soc_.pes[p].capacity) * epoch_ns_len;
            util[p] = std::clamp(r.busy_epoch_ns / cap, 0.0, 1.0);
            r.st.push_utilization_sample(r.busy_epoch_ns, cap);
            zone_power[r.zone] += (r.dyn_epoch_uj + r.static_epoch_uj) / epoch_us;
        }
        for (std::size_t z = 0; z < zone_states_.size(); ++z) {
            zone_states_[z] = power::step_thermal(zone_models_[z], zone_power[z], epoch_us, zone_states_[z]);
            ledger_.max_temperature_c = std::max(ledger_.max_temperature_c, zone_states_[z].temperature_c);
            if (zone_states_[z].throttled) ++ledger_.throttled_epochs;
        }
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            const auto& d = soc_.pes[p];
            auto& r = pes_[p];
            int target =
                power::governor_target(d.dvfs_policy, r.st.current_opp, d.max_opp_index(), util[p], soc_.ondemand);
            if (zone_states_[r.zone].throttled) target = 0;
            if (target != r.st.current_opp) set_opp(p, target);
            if (options_.record_traces) {
                ledger_.traces.push_back({now_, d.name, r.dyn_epoch_uj / epoch_us, r.static_epoch_uj / epoch_us,
                                          zone_states_[r.zone].temperature_c, r.st.current_opp});
            }
            r.busy_epoch_ns = 0.0;
            r.dyn_epoch_uj = 0.0;
            r.static_epoch_uj = 0.0;
        }
        log_event("dtpm", -1, -1, -1, -1);
        last_epoch_ = now_;
        if (pending_work()) push({now_ + epoch_ns(), EvKind::Dtpm});
    }

    void set_opp(std::size_t p, int target) {
        const auto& d = soc_.pes[p];
        auto& r = pes_[p];
        const double f_max = d.max_frequency_hz();
        const double f_old = d.opps[static_cast<std::size_t>(r.st.current_opp)].frequency_hz;
        const double f_new = d.opps[static_cast<std::size_t>(target)].frequency_hz;
        r.st.current_opp = target;
        for (std::size_t i = 0; i < r.slots.size(); ++i) {
            auto& s = r.slots[i];
            if (!s.busy) continue;
            const double elapsed = static_cast<double>(now_ - s.seg_start);
            const double compute_old = s.remaining_ref_ns * f_max / f_old;
            if (elapsed < compute_old) {
                s.remaining_ref_ns -= elapsed * f_old / f_max;
            } else {
                const auto into_mem = static_cast<SimTime>(std::llround(elapsed - compute_old));
                s.mem_left = s.mem_left > into_mem ? s.mem_left - into_mem : 0;
                s.remaining_ref_ns = 0.0;
            }
            s.seg_start = now_;
            s.finish = now_ + static_cast<SimTime>(std::llround(s.remaining_ref_ns * f_max / f_new)) + s.mem_left;
            ++s.generation;
            Event ev{s.finish, EvKind::Finish, s.job, s.task};
            ev.pe = static_cast<int>(p);
            ev.slot = static_cast<int>(i);
            ev.generation = s.generation;
            push(ev);
        }
    }

    void observe_blocking() {
        for (const auto& [j, t] : newly_ready_) {
            const auto& job = *jobs_[j];
            const int kind = app_kinds_[job.app][t];
            for (std::size_t p : candidates_[static_cast<std::size_t>(kind)]) {
                auto& r = pes_[p];
                resource::record_blocking_observation(r.st, r.st.busy_slots == soc_.pes[p].capacity);
            }
        }
        newly_ready_.clear();
    }

    double noc_load() {
        while (!transfers_.empty() && transfers_.top() <= now_) transfers_.pop();
        return static_cast<double>(transfers_.size()) / soc_.noc.link_capacity;
    }

    void schedule_ready() {
        if (ready_.empty()) return;
        std::sort(ready_.begin(), ready_.end());
        const double load = noc_load();

        sched::SchedulingContext ctx;
        ctx.now = now_;
        ctx.tasks.reserve(ready_.size());
        for (const auto& [j, t] : ready_) {
            const auto& job = *jobs_[j];
            const auto& g = apps_[job.app];
            const auto& node = g.node(t);
            sched::ReadyTask rt;
            rt.job = j;
            rt.task = t;
            rt.app = g.name();
            rt.kind = node.kind;
            rt.job_arrival = job.arrival;
            rt.ready_time = job.tasks[t].ready;
            rt.exec_ns.resize(pes_.size());
            rt.data_ready.assign(pes_.size(), now_);
            for (std::size_t p = 0; p < pes_.size(); ++p) {
                const auto& d = soc_.pes[p];
                if (d.supports(node.kind)) {
                    rt.exec_ns[p] = resource::scaled_latency_ns(d, node.kind, pes_[p].st.current_opp);
                }
                SimTime dr = job.tasks[t].ready;
                for (TaskId pred : node.predecessors) {
                    const auto& pr = job.tasks[pred];
                    const SimTime arrive =
                        pr.finish + communication_delay(g.edge_volume(pred, t), soc_.pes[pr.pe].id, d.id, load, soc_.noc);
                    dr = std::max(dr, arrive);
                }
                rt.data_ready[p] = dr;
            }
            ctx.tasks.push_back(std::move(rt));
        }
        ctx.pes.reserve(pes_.size());
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            const auto& d = soc_.pes[p];
            const auto& r = pes_[p];
            sched::PeView v;
            v.id = d.id;
            v.capacity = d.capacity;
            v.load = r.st.busy_slots + static_cast<int>(r.exec.size());
            v.windowed_utilization = r.st.windowed_utilization();
            v.slot_available.reserve(r.est_free.size());
            for (SimTime e : r.est_free) v.slot_available.push_back(std::max(e, now_));
            v.opp_index = r.st.current_opp;
            ctx.pes.push_back(std::move(v));
        }

        const auto assignment = scheduler_.schedule(ctx);

        std::map<std::pair<JobId, TaskId>, std::size_t> index;
        for (std::size_t i = 0; i < ctx.tasks.size(); ++i) index[{ctx.tasks[i].job, ctx.tasks[i].task}] = i;
        std::vector<bool> assigned(ctx.tasks.size(), false);
        for (const auto& pl : assignment) {
            auto it = index.find({pl.job, pl.task});
            if (it == index.end()) {
                throw ConfigError("scheduler assigned job " + std::to_string(pl.job) + " task " +
                                  std::to_string(pl.task) + " which is not ready");
            }
            if (assigned[it->second]) {
                throw ConfigError("scheduler assigned job " + std::to_string(pl.job) + " task " +
                                  std::to_string(pl.task) + " twice");
            }
            std::size_t p = 0;
            try {
                p = soc_.index_of(pl.pe);
            } catch (const ConfigError&) {
                throw ConfigError("scheduler assigned job " + std::to_string(pl.job) + " task " +
                                  std::to_string(pl.task) + " to unknown PE " + std::to_string(pl.pe));
            }
            const auto& rt = ctx.tasks[it->second];
            if (!rt.exec_ns[p]) {
                throw ConfigError("scheduler assigned job " + std::to_string(pl.job) + " task " +
                                  std::to_string(pl.task) + " (" + rt.kind + ") to PE " + std::to_string(pl.pe) +
                                  " which does not support it");
            }
            assigned[it->second] = true;
            commit(rt, p, load);
        }
        std::vector<std::pair<JobId, TaskId>> left;
        for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
            if (!assigned[i]) left.emplace_back(ctx.tasks[i].job, ctx.tasks[i].task);
        }
        ready_ = std::move(left);
    }

    void commit(const sched::ReadyTask& rt, std::size_t p, double load) {
        auto& job = *jobs_[rt.job];
        const auto& g = apps_[job.app];
        auto& tr = job.tasks[rt.task];
        tr.pe = static_cast<int>(p);
        tr.data_ready = rt.data_ready[p];
        job.queues.mark_executable(rt.task);
        for (TaskId pred : g.node(rt.task).predecessors) {
            const auto& pr = job.tasks[pred];
            if (static_cast<std::size_t>(pr.pe) == p) continue;
            const SimTime end =
                pr.finish + communication_delay(g.edge_volume(pred, rt.task), soc_.pes[pr.pe].id, soc_.pes[p].id,
                                                load, soc_.noc);
            if (end > now_) transfers_.push(end);
        }
        auto& r = pes_[p];
        r.exec.emplace(tr.data_ready, rt.job, rt.task);
        auto slot = std::min_element(r.est_free.begin(), r.est_free.end());
        *slot = std::max({*slot, tr.data_ready, now_}) + *rt.exec_ns[p];
    }

    void dispatch() {
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            auto& r = pes_[p];
            while (!r.exec.empty() && r.st.busy_slots < soc_.pes[p].capacity) {
                const auto [dr, j, t] = *r.exec.begin();
                if (dr > now_) break;
                r.exec.erase(r.exec.begin());
                start(p, j, t);
            }
            if (!r.exec.empty() && r.st.busy_slots < soc_.pes[p].capacity) {
                const SimTime w = std::get<0>(*r.exec.begin());
                if (r.wake_at <= now_ || w < r.wake_at) {
                    r.wake_at = w;
                    Event ev{w, EvKind::Wake};
                    ev.pe = static_cast<int>(p);
                    push(ev);
                }
            }
        }
    }

    void start(std::size_t p, JobId j, TaskId t) {
        const auto& d = soc_.pes[p];
        auto& r = pes_[p];
        auto& job = *jobs_[j];
        const auto& g = apps_[job.app];
        const auto& kind = g.node(t).kind;
        std::size_t slot = 0;
        while (r.slots[slot].busy) ++slot;
        auto& s = r.slots[slot];

        const SimTime compute = resource::scaled_latency_ns(d, kind, r.st.current_opp);
        const SimTime mem = memory_latency(window_, now_, soc_.dram, &ledger_.dram_saturations);
        window_.add(now_, g.input_bytes(t));

        s.busy = true;
        s.job = j;
        s.task = t;
        s.kind = app_kinds_[job.app][t];
        s.opp = r.st.current_opp;
        s.start = now_;
        s.seg_start = now_;
        s.remaining_ref_ns = d.latency_profile_us.at(kind) * static_cast<double>(kNsPerUs);
        s.mem_left = mem;
        s.finish = now_ + compute + mem;
        ++s.generation;
        ++r.st.busy_slots;

        job.queues.mark_running(t);
        job.tasks[t].start = now_;
        log_event("start", j, t, d.id, s.opp);

        Event ev{s.finish, EvKind::Finish, j, t};
        ev.pe = static_cast<int>(p);
        ev.slot = static_cast<int>(slot);
        ev.generation = s.generation;
        push(ev);
    }

    void finalize() {
        ledger_.sim_end = now_;
        ledger_.pes.reserve(pes_.size());
        for (std::size_t p = 0; p < pes_.size(); ++p) {
            const auto& d = soc_.pes[p];
            const auto& r = pes_[p];
            metrics::PeStats st;
            st.id = d.id;
            st.name = d.name;
            st.cluster = d.type == resource::PeType::Accelerator ? d.subtype : d.cluster;
            st.subtype = d.subtype;
            st.capacity = d.capacity;
            st.busy_ns = pe_busy_[p];
            st.blocking = r.st.blocking;
            st.energy_uj = pe_energy_[p];
            for (std::size_t k = 0; k < kind_names_.size(); ++k) {
                if (r.busy_by_kind[k] > 0.0) st.busy_by_kind_ns[kind_names_[k]] = r.busy_by_kind[k];
            }
            ledger_.pes.push_back(std::move(st));
        }
    }

    const resource::SocConfig& soc_;
    const std::vector<app::AppTemplate>& apps_;
    const sched::Scheduler& scheduler_;
    RunOptions options_;
    ArrivalSource source_;
    std::optional<SimTime> end_time_;

    MemorySlidingWindow window_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    // Queued events other than epochs and the end marker.
    std::size_t progress_events_ = 0;
    std::priority_queue<SimTime, std::vector<SimTime>, std::greater<>> transfers_;
    std::uint64_t seq_ = 0;
    SimTime now_ = 0;
    SimTime last_epoch_ = 0;
    bool source_done_ = false;
    std::uint64_t in_flight_ = 0;

    std::vector<std::unique_ptr<JobState>> jobs_;
    std::vector<std::pair<JobId, TaskId>> ready_;
    std::vector<std::pair<JobId, TaskId>> newly_ready_;
    std::vector<PeRun> pes_;
    std::map<std::size_t, std::vector<std::size_t>> candidates_;
    std::vector<double> pe_busy_ = std::vector<double>(soc_.pes.size(), 0.0);
    std::vector<double> pe_energy_ = std::vector<double>(soc_.pes.size(), 0.0);

    std::unordered_map<std::string, int> kind_index_;
    std::vector<std::string> kind_names_;
    std::vector<std::vector<int>> app_kinds_;

    std::vector<std::string> zone_names_;
    std::vector<power::ThermalModel> zone_models_;
    std::vector<power::ThermalState> zone_states_;

    metrics::MetricsLedger ledger_;
};

} // namespace

metrics::MetricsLedger run(const resource::SocConfig& soc, const workload::WorkloadSpec& spec,
                           const sched::Scheduler& scheduler, const RunOptions& options) {
    const auto apps = workload::build_templates(spec);
    auto gen = std::make_shared<workload::JobGenerator>(spec);
    std::optional<SimTime> end;
    if (spec.duration_us) end = us_to_ns(*spec.duration_us);
    Kernel k(soc, apps, scheduler, options, [gen] { return gen->next(); }, end);
    return k.run();
}

metrics::MetricsLedger run_jobs(const resource::SocConfig& soc, const std::vector<app::AppTemplate>& apps,
                                const std::vector<JobSpec>& jobs, const sched::Scheduler& scheduler,
                                const RunOptions& options) {
    for (std::size_t i = 1; i < jobs.size(); ++i) {
        if (jobs[i].arrival < jobs[i - 1].arrival) throw ConfigError("job arrivals must be non-decreasing");
    }
    for (const auto& j : jobs) {
        if (j.app_index >= apps.size()) throw ConfigError("job refers to an unknown application");
    }
    auto next = std::make_shared<std::size_t>(0);
    auto source = [&jobs, next]() -> std::optional<workload::Arrival> {
        if (*next >= jobs.size()) return std::nullopt;
        const auto& j = jobs[*next];
        workload::Arrival a{static_cast<JobId>(*next), j.app_index, j.arrival, 0.0};
        ++*next;
        return a;
    };
    Kernel k(soc, apps, scheduler, options, source, std::nullopt);
    return k.run();
}

SimTime single_job_makespan(const resource::SocConfig& soc, const app::AppTemplate& graph,
                            const sched::Scheduler& scheduler, metrics::MetricsLedger* ledger_out) {
    const std::vector<app::AppTemplate> apps{graph};
    RunOptions opts;
    opts.record_traces = false;
    opts.record_gantt = ledger_out != nullptr;
    auto ledger = run_jobs(soc, apps, {JobSpec{0, 0}}, scheduler, opts);
    if (ledger.jobs.empty() || !ledger.jobs.front().completion) throw SimulationError("single job did not complete");
    const SimTime makespan = *ledger.jobs.front().completion - ledger.jobs.front().arrival;
    if (ledger_out) *ledger_out = std::move(ledger);
    return makespan;
}

} // namespace dssim::kernel
