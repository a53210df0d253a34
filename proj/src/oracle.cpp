#include <dssim/oracle.hpp>

#include <dssim/kernel.hpp>

#include <limits>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dssim::sched {

namespace {

std::vector<std::vector<std::size_t>> candidate_pes(const app::AppTemplate& graph, const resource::SocConfig& soc) {
    std::vector<std::vector<std::size_t>> out(graph.size());
    for (const auto& n : graph.nodes()) {
        for (std::size_t p = 0; p < soc.pes.size(); ++p) {
            if (soc.pes[p].supports(n.kind)) out[n.id].push_back(p);
        }
        if (out[n.id].empty()) throw ConfigError("no PE supports task kind '" + n.kind + "'");
    }
    return out;
}

ScheduleTable to_table(const app::AppTemplate& graph, const resource::SocConfig& soc,
                       const std::vector<std::size_t>& pe_index) {
    ScheduleTable t;
    auto& m = t.entries[graph.name()];
    for (std::size_t i = 0; i < pe_index.size(); ++i) m[static_cast<TaskId>(i)] = soc.pes[pe_index[i]].id;
    return t;
}

SimTime evaluate(const app::AppTemplate& graph, const resource::SocConfig& soc,
                 const std::vector<std::size_t>& pe_index) {
    TableScheduler s(to_table(graph, soc, pe_index));
    return kernel::single_job_makespan(soc, graph, s);
}

void check_limits(const app::AppTemplate& graph, const resource::SocConfig& soc, const OracleLimits& limits) {
    if (graph.size() > limits.max_tasks || soc.pes.size() > limits.max_pes) {
        throw ConfigError("oracle: instance has " + std::to_string(graph.size()) + " tasks and " +
                          std::to_string(soc.pes.size()) + " PEs; exhaustive search is bounded to " +
                          std::to_string(limits.max_tasks) + " tasks and " + std::to_string(limits.max_pes) +
                          " PEs");
    }
}

using Best = std::pair<SimTime, std::uint64_t>;

OracleResult finish(const app::AppTemplate& graph, const resource::SocConfig& soc,
                    const std::vector<std::vector<std::size_t>>& cands, Best best, std::uint64_t n) {
    OracleResult r;
    r.table = to_table(graph, soc, decode_assignment(best.second, cands));
    r.makespan = best.first;
    r.evaluated = n;
    r.exhaustive = true;
    return r;
}

} // namespace

std::uint64_t assignment_space(const app::AppTemplate& graph, const resource::SocConfig& soc) {
    std::uint64_t n = 1;
    for (const auto& c : candidate_pes(graph, soc)) {
        if (n > std::numeric_limits<std::uint64_t>::max() / c.size()) return std::numeric_limits<std::uint64_t>::max();
        n *= c.size();
    }
    return n;
}

std::vector<std::size_t> decode_assignment(std::uint64_t index,
                                           const std::vector<std::vector<std::size_t>>& candidates) {
    std::vector<std::size_t> out(candidates.size());
    for (std::size_t i = candidates.size(); i-- > 0;) {
        const auto radix = static_cast<std::uint64_t>(candidates[i].size());
        out[i] = candidates[i][index % radix];
        index /= radix;
    }
    return out;
}

OracleResult oracle_optimal_table_serial(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                         const OracleLimits& limits) {
    check_limits(graph, soc, limits);
    const auto cands = candidate_pes(graph, soc);
    const std::uint64_t n = assignment_space(graph, soc);
    Best best{std::numeric_limits<SimTime>::max(), 0};
    for (std::uint64_t i = 0; i < n; ++i) {
        const Best cur{evaluate(graph, soc, decode_assignment(i, cands)), i};
        if (cur < best) best = cur;
    }
    return finish(graph, soc, cands, best, n);
}

OracleResult oracle_optimal_table(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                  const OracleLimits& limits) {
    check_limits(graph, soc, limits);
    const auto cands = candidate_pes(graph, soc);
    const std::uint64_t n = assignment_space(graph, soc);
    Best best{std::numeric_limits<SimTime>::max(), 0};
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel
    {
        Best local{std::numeric_limits<SimTime>::max(), 0};
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            const auto idx = static_cast<std::uint64_t>(i);
            const Best cur{evaluate(graph, soc, decode_assignment(idx, cands)), idx};
            if (cur < local) local = cur;
        }
#pragma omp critical
        {
            if (local < best) best = local;
        }
    }
    return finish(graph, soc, cands, best, n);
}

std::map<TaskId, PeId> single_job_mapping(const app::AppTemplate& graph, const resource::SocConfig& soc,
                                          const Scheduler& scheduler) {
    metrics::MetricsLedger ledger;
    (void)kernel::single_job_makespan(soc, graph, scheduler, &ledger);
    std::map<TaskId, PeId> out;
    for (const auto& g : ledger.gantt) out[g.task] = g.pe;
    return out;
}

OracleResult table_search(const app::AppTemplate& graph, const resource::SocConfig& soc,
                          const SearchOptions& options) {
    const auto cands = candidate_pes(graph, soc);
    OracleResult r;

    auto to_indices = [&](const std::map<TaskId, PeId>& m) {
        std::vector<std::size_t> v(graph.size());
        for (const auto& [t, pe] : m) v[t] = soc.index_of(pe);
        return v;
    };
    std::vector<std::size_t> cur;
    SimTime cur_span = std::numeric_limits<SimTime>::max();
    const EtfScheduler etf;
    const MetScheduler met;
    for (const Scheduler* s : {static_cast<const Scheduler*>(&etf), static_cast<const Scheduler*>(&met)}) {
        auto seed = to_indices(single_job_mapping(graph, soc, *s));
        const SimTime span = evaluate(graph, soc, seed);
        ++r.evaluated;
        if (span < cur_span) {
            cur_span = span;
            cur = std::move(seed);
        }
    }

    bool improved = true;
    while (improved && r.evaluated < options.max_evaluations) {
        improved = false;
        for (TaskId t : graph.topological_order()) {
            if (r.evaluated >= options.max_evaluations) break;
            const std::size_t keep = cur[t];
            std::size_t best_pe = keep;
            SimTime best_span = cur_span;
            for (std::size_t p : cands[t]) {
                if (p == keep || r.evaluated >= options.max_evaluations) continue;
                cur[t] = p;
                const SimTime span = evaluate(graph, soc, cur);
                ++r.evaluated;
                if (span < best_span) {
                    best_span = span;
                    best_pe = p;
                }
            }
            cur[t] = best_pe;
            if (best_pe != keep) {
                cur_span = best_span;
                improved = true;
            }
        }
    }
    r.table = to_table(graph, soc, cur);
    r.makespan = cur_span;
    r.exhaustive = false;
    return r;
}

OracleResult best_table(const app::AppTemplate& graph, const resource::SocConfig& soc, const OracleLimits& limits,
                        const SearchOptions& options) {
    if (graph.size() <= limits.max_tasks && soc.pes.size() <= limits.max_pes) {
        return oracle_optimal_table(graph, soc, limits);
    }
    return table_search(graph, soc, options);
}

std::unique_ptr<TableScheduler> make_oracle_scheduler(const std::vector<app::AppTemplate>& apps,
                                                      const resource::SocConfig& soc) {
    ScheduleTable table;
    for (const auto& a : apps) {
        auto r = best_table(a, soc);
        table.entries[a.name()] = r.table.entries.at(a.name());
    }
    return std::make_unique<TableScheduler>(std::move(table));
}

std::unique_ptr<Scheduler> make_scheduler_for(const std::string& selector, const std::vector<app::AppTemplate>& apps,
                                              const resource::SocConfig& soc) {
    if (selector == "oracle") return make_oracle_scheduler(apps, soc);
    return make_scheduler(selector);
}

} // namespace dssim::sched
