#include <dssim/scheduler.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <tuple>

namespace dssim::sched {

namespace {

[[noreturn]] void no_supporting_pe(const ReadyTask& t) {
    throw ConfigError("no PE supports task kind '" + t.kind + "' (job " + std::to_string(t.job) + ", task " +
                      std::to_string(t.task) + ")");
}

std::vector<std::size_t> fifo_order(const SchedulingContext& ctx) {
    std::vector<std::size_t> order(ctx.tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = ctx.tasks[a];
        const auto& y = ctx.tasks[b];
        return std::tie(x.job_arrival, x.job, x.task) < std::tie(y.job_arrival, y.job, y.task);
    });
    return order;
}

} // namespace

Assignment MetScheduler::schedule(const SchedulingContext& ctx) const {
    Assignment out;
    std::vector<int> load(ctx.pes.size());
    for (std::size_t p = 0; p < ctx.pes.size(); ++p) load[p] = ctx.pes[p].load;

    for (std::size_t i : fifo_order(ctx)) {
        const auto& t = ctx.tasks[i];
        std::optional<SimTime> best;
        for (const auto& e : t.exec_ns) {
            if (e && (!best || *e < *best)) best = e;
        }
        if (!best) no_supporting_pe(t);

        std::optional<std::size_t> pick;
        for (std::size_t p = 0; p < ctx.pes.size(); ++p) {
            if (t.exec_ns[p] != best) continue;
            if (!pick) {
                pick = p;
                continue;
            }
            const auto& a = ctx.pes[p];
            const auto& b = ctx.pes[*pick];
            // Load is compared as a fraction of capacity: a*cap_b < b*cap_a.
            const long lhs = static_cast<long>(load[p]) * b.capacity;
            const long rhs = static_cast<long>(load[*pick]) * a.capacity;
            if (std::tie(lhs, a.windowed_utilization, a.id) < std::tie(rhs, b.windowed_utilization, b.id)) pick = p;
        }
        ++load[*pick];
        out.push_back({t.job, t.task, ctx.pes[*pick].id});
    }
    return out;
}

Assignment EtfScheduler::schedule(const SchedulingContext& ctx) const {
    Assignment out;
    std::vector<std::vector<SimTime>> slots;
    slots.reserve(ctx.pes.size());
    for (const auto& pe : ctx.pes) {
        auto s = pe.slot_available;
        if (s.empty()) s.assign(static_cast<std::size_t>(pe.capacity), ctx.now);
        slots.push_back(std::move(s));
    }
    std::vector<bool> done(ctx.tasks.size(), false);

    for (std::size_t round = 0; round < ctx.tasks.size(); ++round) {
        constexpr SimTime kInf = std::numeric_limits<SimTime>::max();
        SimTime best_finish = kInf;
        std::size_t best_task = 0;
        std::size_t best_pe = 0;
        for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
            if (done[i]) continue;
            const auto& t = ctx.tasks[i];
            bool supported = false;
            for (std::size_t p = 0; p < ctx.pes.size(); ++p) {
                if (!t.exec_ns[p]) continue;
                supported = true;
                const SimTime avail = *std::min_element(slots[p].begin(), slots[p].end());
                const SimTime finish = std::max(avail, t.data_ready[p]) + *t.exec_ns[p];
                bool better = finish < best_finish;
                if (!better && finish == best_finish) {
                    const auto& bt = ctx.tasks[best_task];
                    better = std::tie(t.job, t.task, ctx.pes[p].id) < std::tie(bt.job, bt.task, ctx.pes[best_pe].id);
                }
                if (better) {
                    best_finish = finish;
                    best_task = i;
                    best_pe = p;
                }
            }
            if (!supported) no_supporting_pe(t);
        }
        done[best_task] = true;
        *std::min_element(slots[best_pe].begin(), slots[best_pe].end()) = best_finish;
        const auto& t = ctx.tasks[best_task];
        out.push_back({t.job, t.task, ctx.pes[best_pe].id});
    }
    return out;
}

Assignment TableScheduler::schedule(const SchedulingContext& ctx) const {
    Assignment out;
    for (std::size_t i : fifo_order(ctx)) {
        const auto& t = ctx.tasks[i];
        auto app = table_.entries.find(t.app);
        if (app == table_.entries.end()) throw ConfigError("schedule table has no entry for app '" + t.app + "'");
        auto pe = app->second.find(t.task);
        if (pe == app->second.end()) {
            throw ConfigError("schedule table for '" + t.app + "' misses task " + std::to_string(t.task));
        }
        out.push_back({t.job, t.task, pe->second});
    }
    return out;
}

void TableScheduler::validate(const std::vector<app::AppTemplate>& apps, const resource::SocConfig& soc) const {
    for (const auto& a : apps) {
        auto it = table_.entries.find(a.name());
        if (it == table_.entries.end()) throw ConfigError("schedule table has no entry for app '" + a.name() + "'");
        for (const auto& node : a.nodes()) {
            auto pe = it->second.find(node.id);
            if (pe == it->second.end()) {
                throw ConfigError("schedule table for '" + a.name() + "' misses task " + std::to_string(node.id));
            }
            const auto& desc = soc.pes[soc.index_of(pe->second)];
            if (!desc.supports(node.kind)) {
                throw ConfigError("schedule table maps '" + a.name() + "' task " + std::to_string(node.id) +
                                  " to PE " + std::to_string(pe->second) + " which does not support '" + node.kind +
                                  "'");
            }
        }
    }
}

nlohmann::json ScheduleTable::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [app, map] : entries) {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [task, pe] : map) m[std::to_string(task)] = pe;
        out[app] = m;
    }
    return out;
}

ScheduleTable ScheduleTable::from_json(const nlohmann::json& j) {
    ScheduleTable t;
    try {
        for (const auto& [app, m] : j.items()) {
            for (const auto& [task, pe] : m.items()) {
                std::size_t used = 0;
                const auto id = std::stoul(task, &used);
                if (used != task.size()) throw ConfigError("schedule table: bad task id '" + task + "'");
                t.entries[app][static_cast<TaskId>(id)] = pe.get<PeId>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed schedule table: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ConfigError("schedule table: task ids must be integers");
    }
    return t;
}

ScheduleTable ScheduleTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schedule table " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed schedule table " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

void ScheduleTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& selector) {
    if (selector == "met") return std::make_unique<MetScheduler>();
    if (selector == "etf") return std::make_unique<EtfScheduler>();
    if (selector.rfind("table:", 0) == 0) {
        return std::make_unique<TableScheduler>(ScheduleTable::load(selector.substr(6)));
    }
    throw ConfigError("unknown scheduler '" + selector + "' (met|etf|table:<path>|oracle)");
}

} // namespace dssim::sched
