#include <dssim/dse.hpp>

#include <dssim/kernel.hpp>
#include <dssim/oracle.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dssim::dse {

using nlohmann::json;

double area_model(const resource::SocConfig& soc, double packing_factor) {
    double pes = 0.0;
    for (const auto& pe : soc.pes) pes += pe.area_mm2;
    return soc.uncore_area_mm2 + pes * packing_factor;
}

int thread_count() {
    int n = 1;
#ifdef _OPENMP
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("DSSIM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = cap;
    }
    return std::max(1, n);
}

std::map<std::string, int> subtype_counts(const resource::SocConfig& soc) {
    std::map<std::string, int> out;
    for (const auto& pe : soc.pes) ++out[pe.subtype];
    return out;
}

resource::SocConfig with_counts(const resource::SocConfig& base, const std::map<std::string, int>& counts,
                                const std::vector<Candidate>& templates) {
    resource::SocConfig out = base;
    out.pes.clear();
    std::map<std::string, int> kept;
    std::map<std::string, const resource::PeDescriptor*> sample;
    for (const auto& pe : base.pes) {
        sample.try_emplace(pe.subtype, &pe);
        auto want = counts.find(pe.subtype);
        if (want != counts.end() && kept[pe.subtype] >= want->second) continue;
        ++kept[pe.subtype];
        out.pes.push_back(pe);
    }
    for (const auto& [subtype, n] : counts) {
        if (n < 0) throw ConfigError("count for '" + subtype + "' must be >= 0");
        const resource::PeDescriptor* tmpl = nullptr;
        for (const auto& c : templates) {
            if (c.subtype == subtype) tmpl = &c.tmpl;
        }
        if (auto it = sample.find(subtype); it != sample.end()) tmpl = it->second;
        if (kept[subtype] < n && tmpl == nullptr) {
            throw ConfigError("no template PE for subtype '" + subtype + "'");
        }
        std::string stem = tmpl ? tmpl->name : subtype;
        if (auto pos = stem.rfind('_'); pos != std::string::npos) stem = stem.substr(0, pos);
        for (int k = kept[subtype]; k < n; ++k) {
            resource::PeDescriptor pe = *tmpl;
            pe.name = stem + "_" + std::to_string(k);
            out.pes.push_back(pe);
        }
    }
    for (std::size_t i = 0; i < out.pes.size(); ++i) out.pes[i].id = static_cast<PeId>(i);
    resource::validate(out);
    return out;
}

namespace {

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed " + path.string() + ": " + e.what());
    }
    return j;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

std::map<std::string, int> counts_from(const json& j, const std::string& where) {
    std::map<std::string, int> out;
    try {
        for (const auto& [k, v] : j.items()) out[k] = v.get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return out;
}

template <typename T>
void mean_into(std::optional<double>& acc, const std::optional<T>& v, int& n) {
    if (!v) return;
    acc = acc.value_or(0.0) + *v;
    ++n;
}

} // namespace

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
    const json j = read_json(path);
    std::vector<Candidate> out;
    try {
        for (const auto& c : j.at("candidates")) {
            check_keys(c, {"subtype", "template", "max_count"}, "candidates");
            Candidate cand;
            cand.subtype = c.at("subtype").get<std::string>();
            cand.tmpl = resource::pe_from_json(c.at("template"));
            cand.max_count = c.value("max_count", 8);
            if (cand.tmpl.subtype != cand.subtype) {
                throw ConfigError("candidate '" + cand.subtype + "' template has subtype '" + cand.tmpl.subtype + "'");
            }
            out.push_back(std::move(cand));
        }
    } catch (const json::exception& e) {
        throw ConfigError("candidates: " + std::string(e.what()));
    }
    return out;
}

std::vector<GridCell> dvfs_cells(const resource::SocConfig& base, const DvfsSweep& sweep) {
    std::vector<std::size_t> big;
    std::vector<std::size_t> little;
    for (std::size_t i = 0; i < base.pes.size(); ++i) {
        if (base.pes[i].type != resource::PeType::GeneralCore) continue;
        if (base.pes[i].cluster == sweep.big_cluster) big.push_back(i);
        if (base.pes[i].cluster == sweep.little_cluster) little.push_back(i);
    }
    if (big.empty() || little.empty()) throw ConfigError("dvfs sweep needs both a big and a LITTLE cluster");
    const int big_opps = base.pes[big.front()].max_opp_index() + 1;
    const int little_opps = base.pes[little.front()].max_opp_index() + 1;

    std::vector<GridCell> out;
    for (int bo = 0; bo < big_opps; ++bo) {
        for (int lo = 0; lo < little_opps; ++lo) {
            for (int nb = sweep.min_big; nb <= static_cast<int>(big.size()); ++nb) {
                for (int nl = sweep.min_little; nl <= static_cast<int>(little.size()); ++nl) {
                    resource::SocConfig soc = base;
                    soc.pes.clear();
                    int seen_big = 0;
                    int seen_little = 0;
                    for (const auto& pe : base.pes) {
                        auto copy = pe;
                        if (pe.type == resource::PeType::GeneralCore && pe.cluster == sweep.big_cluster) {
                            if (++seen_big > nb) continue;
                            copy.dvfs_policy = {resource::DvfsPolicy::Kind::Fixed, bo};
                        } else if (pe.type == resource::PeType::GeneralCore && pe.cluster == sweep.little_cluster) {
                            if (++seen_little > nl) continue;
                            copy.dvfs_policy = {resource::DvfsPolicy::Kind::Fixed, lo};
                        }
                        soc.pes.push_back(copy);
                    }
                    for (std::size_t i = 0; i < soc.pes.size(); ++i) soc.pes[i].id = static_cast<PeId>(i);
                    const double fb = base.pes[big.front()].opps[static_cast<std::size_t>(bo)].frequency_hz / 1e6;
                    const double fl = base.pes[little.front()].opps[static_cast<std::size_t>(lo)].frequency_hz / 1e6;
                    out.push_back({"big" + std::to_string(nb) + "@" + metrics::fmt(fb, 0) + "_little" +
                                       std::to_string(nl) + "@" + metrics::fmt(fl, 0),
                                   std::move(soc)});
                }
            }
        }
    }
    if (sweep.include_governors) {
        for (const char* gov : {"ondemand", "powersave", "performance"}) {
            resource::SocConfig soc = base;
            for (auto& pe : soc.pes) {
                if (pe.type == resource::PeType::GeneralCore) pe.dvfs_policy = resource::DvfsPolicy::parse(gov);
            }
            out.push_back({gov, std::move(soc)});
        }
    }
    return out;
}

GridSpec load_grid_spec(const std::filesystem::path& path) {
    const json j = read_json(path);
    check_keys(j, {"base", "workload", "scheduler", "seeds", "packing_factor", "templates", "cells", "axes", "dvfs"},
               "grid");
    const auto dir = path.parent_path();
    GridSpec spec;
    try {
        const auto base = resource::load_soc_config(dir / j.at("base").get<std::string>());
        spec.workload = workload::load_workload(dir / j.at("workload").get<std::string>());
        spec.scheduler = j.value("scheduler", spec.scheduler);
        spec.seeds = j.value("seeds", 1);
        spec.packing_factor = j.value("packing_factor", 1.0);
        std::vector<Candidate> templates;
        if (j.contains("templates")) templates = load_candidates(dir / j["templates"].get<std::string>());

        if (j.contains("cells")) {
            for (const auto& c : j["cells"]) {
                check_keys(c, {"name", "counts", "soc"}, "grid.cells");
                GridCell cell;
                cell.name = c.at("name").get<std::string>();
                if (c.contains("soc")) {
                    cell.soc = resource::load_soc_config(dir / c["soc"].get<std::string>());
                } else {
                    cell.soc = with_counts(base, counts_from(c.at("counts"), "grid.cells"), templates);
                }
                spec.cells.push_back(std::move(cell));
            }
        }
        if (j.contains("axes")) {
            std::vector<std::map<std::string, int>> combos{{}};
            for (const auto& [subtype, values] : j["axes"].items()) {
                std::vector<std::map<std::string, int>> next;
                for (const auto& partial : combos) {
                    for (const auto& v : values) {
                        auto c = partial;
                        c[subtype] = v.get<int>();
                        next.push_back(std::move(c));
                    }
                }
                combos = std::move(next);
            }
            for (const auto& c : combos) {
                std::string name;
                for (const auto& [k, v] : c) name += (name.empty() ? "" : "+") + k + "=" + std::to_string(v);
                spec.cells.push_back({name, with_counts(base, c, templates)});
            }
        }
        if (j.contains("dvfs")) {
            const auto& d = j["dvfs"];
            check_keys(d, {"include_governors", "min_big", "min_little", "big_cluster", "little_cluster"}, "grid.dvfs");
            DvfsSweep sweep;
            sweep.include_governors = d.value("include_governors", true);
            sweep.min_big = d.value("min_big", 1);
            sweep.min_little = d.value("min_little", 1);
            sweep.big_cluster = d.value("big_cluster", sweep.big_cluster);
            sweep.little_cluster = d.value("little_cluster", sweep.little_cluster);
            for (auto& c : dvfs_cells(base, sweep)) spec.cells.push_back(std::move(c));
        }
    } catch (const json::exception& e) {
        throw ConfigError("grid: " + std::string(e.what()));
    }
    if (spec.cells.empty()) throw ConfigError("grid: no cells (give 'cells', 'axes' or 'dvfs')");
    if (spec.seeds < 1) throw ConfigError("grid: seeds must be >= 1");
    return spec;
}

CellResult evaluate_cell(const GridSpec& spec, std::size_t index) {
    const auto& cell = spec.cells.at(index);
    CellResult r;
    r.index = index;
    r.name = cell.name;
    r.area_mm2 = area_model(cell.soc, spec.packing_factor);
    try {
        int n_lat = 0, n_epj = 0, n_edp = 0, n_eap = 0;
        double power = 0.0;
        std::uint64_t completed = 0;
        for (int s = 0; s < spec.seeds; ++s) {
            auto w = spec.workload;
            w.seed += static_cast<std::uint64_t>(s);
            const auto apps = workload::build_templates(w);
            const auto sched = sched::make_scheduler_for(spec.scheduler, apps, cell.soc);
            kernel::RunOptions opts;
            opts.record_gantt = false;
            opts.record_traces = false;
            const auto ledger = kernel::run(cell.soc, w, *sched, opts);
            const auto sum = metrics::summarize(ledger, r.area_mm2);
            mean_into(r.avg_latency_us, sum.avg_latency_us, n_lat);
            mean_into(r.energy_per_job_uj, sum.energy_per_job_uj, n_epj);
            mean_into(r.edp_mj_ms, sum.edp_mj_ms, n_edp);
            mean_into(r.eap, sum.eap, n_eap);
            power += sum.avg_power_w;
            completed += sum.jobs_completed;
        }
        if (r.avg_latency_us) *r.avg_latency_us /= n_lat;
        if (r.energy_per_job_uj) *r.energy_per_job_uj /= n_epj;
        if (r.edp_mj_ms) *r.edp_mj_ms /= n_edp;
        if (r.eap) *r.eap /= n_eap;
        r.avg_power_w = power / spec.seeds;
        r.completed = completed;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

std::vector<CellResult> grid_search_serial(const GridSpec& spec) {
    std::vector<CellResult> out;
    out.reserve(spec.cells.size());
    for (std::size_t i = 0; i < spec.cells.size(); ++i) out.push_back(evaluate_cell(spec, i));
    return out;
}

std::vector<CellResult> grid_search(const GridSpec& spec) {
    std::vector<CellResult> out(spec.cells.size());
    const auto n = static_cast<std::int64_t>(spec.cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = evaluate_cell(spec, static_cast<std::size_t>(i));
    return out;
}

std::vector<std::size_t> grid_pareto(const std::vector<CellResult>& results) {
    std::vector<std::size_t> ok;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty() || !results[i].energy_per_job_uj) continue;
        ok.push_back(i);
        pts.emplace_back(results[i].area_mm2, *results[i].energy_per_job_uj);
    }
    std::vector<std::size_t> out;
    for (std::size_t k : metrics::pareto_frontier(pts)) out.push_back(ok[k]);
    return out;
}

namespace {

std::string opt_str(const std::optional<double>& v, int precision = 3) { return v ? metrics::fmt(*v, precision) : ""; }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

} // namespace

void write_grid_results(const std::vector<CellResult>& results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write " + path.string());
    out << "index,name,area_mm2,avg_latency_us,energy_per_job_uj,edp_mj_ms,eap_uj_mm2,avg_power_w,completed,error\n";
    for (const auto& r : results) {
        out << r.index << ',' << csv_escape(r.name) << ',' << metrics::fmt(r.area_mm2) << ','
            << opt_str(r.avg_latency_us) << ',' << opt_str(r.energy_per_job_uj) << ',' << opt_str(r.edp_mj_ms, 6)
            << ',' << opt_str(r.eap) << ',' << metrics::fmt(r.avg_power_w, 6) << ',' << r.completed << ','
            << csv_escape(r.error) << '\n';
    }
}

void write_pareto(const std::vector<CellResult>& results, const std::vector<std::size_t>& frontier,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write " + path.string());
    out << "index,name,area_mm2,energy_per_job_uj\n";
    for (std::size_t i : frontier) {
        const auto& r = results[i];
        out << r.index << ',' << csv_escape(r.name) << ',' << metrics::fmt(r.area_mm2) << ','
            << opt_str(r.energy_per_job_uj) << '\n';
    }
}

GuidedSpec load_guided_spec(const std::filesystem::path& base_soc, const std::filesystem::path& candidates,
                            const std::filesystem::path& workload_path) {
    GuidedSpec spec;
    spec.base = resource::load_soc_config(base_soc);
    spec.candidates = load_candidates(candidates);
    spec.workload = workload::load_workload(workload_path);
    const json j = read_json(candidates);
    check_keys(j, {"candidates", "utilization_threshold", "blocking_threshold", "budget", "scheduler", "packing_factor"},
               "candidates");
    spec.utilization_threshold = j.value("utilization_threshold", spec.utilization_threshold);
    spec.blocking_threshold = j.value("blocking_threshold", spec.blocking_threshold);
    spec.budget = j.value("budget", spec.budget);
    spec.scheduler = j.value("scheduler", spec.scheduler);
    spec.packing_factor = j.value("packing_factor", spec.packing_factor);
    return spec;
}

GuidedResult guided_search(const GuidedSpec& spec) {
    GuidedResult result;
    std::map<std::string, int> counts;
    const auto base_counts = subtype_counts(spec.base);
    for (const auto& c : spec.candidates) {
        auto it = base_counts.find(c.subtype);
        counts[c.subtype] = it == base_counts.end() ? 0 : it->second;
    }
    std::set<std::string> frozen;
    const auto apps = workload::build_templates(spec.workload);

    for (int iter = 0;; ++iter) {
        const auto soc = with_counts(spec.base, counts, spec.candidates);
        const auto sched = sched::make_scheduler_for(spec.scheduler, apps, soc);
        kernel::RunOptions opts;
        opts.record_gantt = false;
        opts.record_traces = false;
        const auto ledger = kernel::run(soc, spec.workload, *sched, opts);
        const double area = area_model(soc, spec.packing_factor);
        const auto summary = metrics::summarize(ledger, area);
        const auto plane = metrics::cluster_plane(ledger);

        GuidedStep step;
        step.iteration = iter;
        step.counts = counts;
        step.area_mm2 = area;
        step.avg_latency_us = summary.avg_latency_us;
        step.energy_per_job_uj = summary.energy_per_job_uj;
        std::vector<const metrics::ClusterPlane*> hot;
        for (const auto& p : plane) {
            step.plane.push_back({p.cluster, 100.0 * p.utilization, 100.0 * p.blocking});
            const bool high_u = p.utilization > spec.utilization_threshold;
            const bool high_b = p.blocking > spec.blocking_threshold;
            if (high_u && high_b) {
                step.upper_right.push_back(p.cluster);
                hot.push_back(&p);
            }
            if (!high_u && high_b) step.upper_left.push_back(p.cluster);
            // A candidate already present that sits low on both axes is enough.
            if (!high_u && !high_b && counts.contains(p.cluster) && counts[p.cluster] >= 1) frozen.insert(p.cluster);
        }
        step.frozen.assign(frozen.begin(), frozen.end());
        std::stable_sort(hot.begin(), hot.end(), [](const auto* a, const auto* b) { return a->utilization > b->utilization; });

        auto finish = [&](std::string action, std::string reason) {
            step.action = std::move(action);
            result.trace.push_back(step);
            result.stop_reason = std::move(reason);
            result.recommended = soc;
            result.counts = counts;
            return result;
        };

        if (hot.empty()) return finish("stop", "no cluster is in the upper-right region");
        if (iter >= spec.budget) return finish("stop", "budget of " + std::to_string(spec.budget) + " additions exhausted");

        std::optional<std::string> add;
        std::string why;
        for (const auto* h : hot) {
            std::vector<std::pair<std::string, double>> kinds(h->busy_by_kind_ns.begin(), h->busy_by_kind_ns.end());
            std::stable_sort(kinds.begin(), kinds.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
            for (const auto& [kind, _] : kinds) {
                for (const auto& c : spec.candidates) {
                    if (!c.tmpl.supports(kind) || frozen.contains(c.subtype) || counts[c.subtype] >= c.max_count) continue;
                    add = c.subtype;
                    why = "cluster '" + h->cluster + "' is upper-right; '" + kind + "' dominates; add one " + c.subtype;
                    break;
                }
                if (add) break;
            }
            if (add) break;
        }
        if (!add) {
            return finish("stop", "no unfrozen candidate offloads the dominant tasks of cluster '" + hot.front()->cluster + "'");
        }
        ++counts[*add];
        step.action = why;
        result.trace.push_back(step);
    }
}

json to_json(const GuidedResult& r) {
    json trace = json::array();
    for (const auto& s : r.trace) {
        json plane = json::array();
        for (const auto& p : s.plane) {
            plane.push_back({{"cluster", p.cluster}, {"utilization_pct", p.utilization_pct}, {"blocking_pct", p.blocking_pct}});
        }
        trace.push_back({{"iteration", s.iteration},
                         {"counts", s.counts},
                         {"area_mm2", s.area_mm2},
                         {"avg_latency_us", s.avg_latency_us ? json(*s.avg_latency_us) : json(nullptr)},
                         {"energy_per_job_uj", s.energy_per_job_uj ? json(*s.energy_per_job_uj) : json(nullptr)},
                         {"plane", plane},
                         {"upper_right", s.upper_right},
                         {"upper_left", s.upper_left},
                         {"frozen", s.frozen},
                         {"action", s.action}});
    }
    return {{"schema_version", metrics::kSchemaVersion},
            {"recommended_counts", r.counts},
            {"stop_reason", r.stop_reason},
            {"trace", trace},
            {"recommended_soc", resource::to_json(r.recommended)}};
}

} // namespace dssim::dse
