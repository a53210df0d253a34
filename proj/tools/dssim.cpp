// dssim: command-line front end for the simulator.
#include <dssim/app.hpp>
#include <dssim/dse.hpp>
#include <dssim/kernel.hpp>
#include <dssim/metrics.hpp>
#include <dssim/oracle.hpp>
#include <dssim/resource.hpp>
#include <dssim/scheduler.hpp>
#include <dssim/workload.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dssim;

namespace {

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

void apply_governor(resource::SocConfig& soc, const std::string& governor) {
    if (governor.empty()) return;
    const auto policy = resource::DvfsPolicy::parse(governor);
    for (auto& pe : soc.pes) {
        if (pe.type == resource::PeType::GeneralCore) pe.dvfs_policy = policy;
    }
    resource::validate(soc);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SimulationError("cannot create " + dir.string() + ": " + ec.message());
}

std::string selector_name(const std::string& s) { return s == "table" ? "oracle" : s; }

struct SimulateArgs {
    std::string soc, workload, scheduler = "etf", governor, out = "out";
    std::optional<std::uint64_t> seed;
    bool trace = false;
};

int cmd_simulate(const SimulateArgs& a) {
    require_file(a.soc, "SoC config");
    require_file(a.workload, "workload");
    auto soc = resource::load_soc_config(a.soc);
    apply_governor(soc, a.governor);
    auto w = workload::load_workload(a.workload);
    if (a.seed) w.seed = *a.seed;
    for (const auto& warn : soc.warnings) std::cerr << "warning: " << warn << '\n';

    const auto apps = workload::build_templates(w);
    const auto sched = sched::make_scheduler_for(selector_name(a.scheduler), apps, soc);
    kernel::RunOptions opts;
    opts.record_events = a.trace;
    const auto ledger = kernel::run(soc, w, *sched, opts);
    const auto summary = metrics::summarize(ledger, dse::area_model(soc));
    ensure_dir(a.out);
    metrics::export_run(ledger, summary, a.out);
    if (a.trace) metrics::write_events_csv(ledger, fs::path(a.out) / "events.csv");
    std::cout << metrics::to_json(summary).dump(2) << '\n';
    return 0;
}

struct SweepArgs {
    std::string soc, workload, governor, out = "out";
    std::vector<double> rates;
    std::vector<std::string> schedulers{"met", "etf", "table"};
    std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& a) {
    require_file(a.soc, "SoC config");
    require_file(a.workload, "workload");
    if (a.rates.empty()) throw ConfigError("--rates must list at least one rate");
    for (std::size_t i = 0; i < a.rates.size(); ++i) {
        if (!(a.rates[i] > 0.0)) throw ConfigError("--rates must be positive");
        if (i > 0 && a.rates[i] <= a.rates[i - 1]) throw ConfigError("--rates must be ascending");
    }
    auto soc = resource::load_soc_config(a.soc);
    apply_governor(soc, a.governor);
    auto w = workload::load_workload(a.workload);
    if (a.seed) w.seed = *a.seed;
    const auto apps = workload::build_templates(w);

    // One scheduler instance per selector, shared read-only by all rates.
    std::vector<std::unique_ptr<sched::Scheduler>> scheds;
    for (const auto& s : a.schedulers) scheds.push_back(sched::make_scheduler_for(selector_name(s), apps, soc));

    const std::size_t n = a.rates.size() * a.schedulers.size();
    std::vector<std::string> rows(n);
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(dse::thread_count())
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double rate = a.rates[i / a.schedulers.size()];
        const std::size_t s = i % a.schedulers.size();
        try {
            auto wi = w;
            wi.rate_jobs_per_ms = rate;
            kernel::RunOptions opts;
            opts.record_gantt = false;
            opts.record_traces = false;
            const auto sum = metrics::summarize(kernel::run(soc, wi, *scheds[s], opts));
            rows[i] = metrics::fmt(rate) + "," + a.schedulers[s] + "," +
                      (sum.avg_latency_us ? metrics::fmt(*sum.avg_latency_us) : std::string());
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw SimulationError(e);
    }
    ensure_dir(a.out);
    const auto path = fs::path(a.out) / "injection_sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write " + path.string());
    out << "rate_jobs_per_ms,scheduler,avg_latency_us\n";
    for (const auto& r : rows) out << r << '\n';
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_grid(const std::string& spec_path, const std::string& out_dir, bool serial) {
    require_file(spec_path, "grid spec");
    const auto spec = dse::load_grid_spec(spec_path);
    const auto results = serial ? dse::grid_search_serial(spec) : dse::grid_search(spec);
    const auto frontier = dse::grid_pareto(results);
    ensure_dir(out_dir);
    dse::write_grid_results(results, fs::path(out_dir) / "grid_results.csv");
    dse::write_pareto(results, frontier, fs::path(out_dir) / "pareto.csv");

    std::vector<double> edp;
    for (const auto& r : results) {
        if (r.edp_mj_ms) edp.push_back(*r.edp_mj_ms);
    }
    if (!edp.empty()) {
        const auto [lo, hi] = std::minmax_element(edp.begin(), edp.end());
        const double width = *hi > *lo ? (*hi - *lo) / 20.0 : 1.0;
        std::ofstream h(fs::path(out_dir) / "edp_histogram.csv", std::ios::binary);
        h << "bin_lower_mj_ms,count\n";
        for (const auto& b : metrics::histogram(edp, width)) h << metrics::fmt(b.lower, 6) << ',' << b.count << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : results) {
        if (!r.error.empty()) {
            ++failed;
            std::cerr << "cell " << r.index << " (" << r.name << ") failed: " << r.error << '\n';
        }
    }
    std::cout << results.size() << " cells, " << frontier.size() << " on the frontier, " << failed << " failed\n";
    return 0;
}

int cmd_guided(const std::string& base, const std::string& cands, const std::string& wl, const std::string& out_dir) {
    require_file(base, "base SoC config");
    require_file(cands, "candidates");
    require_file(wl, "workload");
    const auto spec = dse::load_guided_spec(base, cands, wl);
    const auto r = dse::guided_search(spec);
    ensure_dir(out_dir);
    std::ofstream out(fs::path(out_dir) / "guided_trace.json", std::ios::binary);
    if (!out) throw SimulationError("cannot write guided_trace.json");
    out << dse::to_json(r).dump(2) << '\n';
    for (const auto& s : r.trace) std::cout << "iteration " << s.iteration << ": " << s.action << '\n';
    std::cout << "stop: " << r.stop_reason << '\n';
    for (const auto& [k, v] : r.counts) std::cout << "  " << k << " = " << v << '\n';
    return 0;
}

int cmd_replay(const std::string& scheduler, const std::string& soc_path, const std::string& out_dir) {
    const auto soc = resource::load_soc_config(soc_path.empty() ? app::data_dir() / "canonical_soc.json" : fs::path(soc_path));
    const auto canon = app::build_canonical_graph();
    std::unique_ptr<sched::Scheduler> s;
    if (scheduler == "oracle" || scheduler == "table") {
        s = std::make_unique<sched::TableScheduler>(sched::oracle_optimal_table(canon.graph, soc).table);
    } else if (scheduler == "met" || scheduler == "etf") {
        s = sched::make_scheduler(scheduler);
    } else {
        throw ConfigError("replay-canonical: scheduler must be met, etf or oracle");
    }
    metrics::MetricsLedger ledger;
    const SimTime span = kernel::single_job_makespan(soc, canon.graph, *s, &ledger);
    auto rows = ledger.gantt;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.task < b.task; });
    std::cout << "task,pe,start_us,end_us\n";
    for (const auto& g : rows) {
        std::cout << g.task << ",P" << g.pe << ',' << metrics::fmt(ns_to_us(g.start), 0) << ','
                  << metrics::fmt(ns_to_us(g.end), 0) << '\n';
    }
    std::cout << "makespan_us," << metrics::fmt(ns_to_us(span), 0) << '\n';
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        metrics::write_gantt_csv(ledger, fs::path(out_dir) / "gantt.csv");
    }
    return 0;
}

int cmd_validate(const std::string& soc_path, const std::string& wl) {
    if (!soc_path.empty()) {
        require_file(soc_path, "SoC config");
        const auto soc = resource::load_soc_config(soc_path);
        for (const auto& w : soc.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << soc_path << ": ok (" << soc.pes.size() << " PEs, area " << metrics::fmt(dse::area_model(soc), 2)
                  << " mm^2)\n";
    }
    if (!wl.empty()) {
        require_file(wl, "workload");
        const auto w = workload::load_workload(wl);
        (void)workload::build_templates(w);
        std::cout << wl << ": ok (" << w.mixture.size() << " applications)\n";
    }
    if (soc_path.empty() && wl.empty()) throw ConfigError("validate-config needs --soc and/or --workload");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Discrete-event simulator for heterogeneous domain-specific SoCs"};
    cli.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = cli.add_subcommand("simulate", "Run one simulation and export gantt.csv, traces.csv, summary.json");
    simulate->add_option("--soc", sim.soc, "SoC config JSON")->required();
    simulate->add_option("--workload", sim.workload, "Workload JSON")->required();
    simulate->add_option("--scheduler", sim.scheduler, "met | etf | table:<path> | oracle");
    simulate->add_option("--governor", sim.governor, "ondemand | performance | powersave | fixed:<i> (general cores)");
    simulate->add_option("--seed", sim.seed, "Override the workload seed");
    simulate->add_option("--out", sim.out, "Output directory");
    simulate->add_flag("--trace", sim.trace, "Also write events.csv");

    SweepArgs sweep;
    auto* sw = cli.add_subcommand("sweep-injection", "Average latency versus injection rate per scheduler");
    sw->add_option("--soc", sweep.soc, "SoC config JSON")->required();
    sw->add_option("--workload", sweep.workload, "Workload JSON (rate is overridden)")->required();
    sw->add_option("--rates", sweep.rates, "Ascending rates in jobs/ms")->required()->delimiter(',');
    sw->add_option("--schedulers", sweep.schedulers, "Schedulers (met, etf, table, table:<path>)")->delimiter(',');
    sw->add_option("--governor", sweep.governor, "Governor for general cores");
    sw->add_option("--seed", sweep.seed, "Override the workload seed");
    sw->add_option("--out", sweep.out, "Output directory");

    auto* dse_cmd = cli.add_subcommand("dse", "Design-space exploration");
    dse_cmd->require_subcommand(1);
    std::string grid_spec, grid_out = "out";
    bool grid_serial = false;
    auto* grid = dse_cmd->add_subcommand("grid", "Grid search over SoC configurations");
    grid->add_option("--spec", grid_spec, "grid.json")->required();
    grid->add_option("--out", grid_out, "Output directory");
    grid->add_flag("--serial", grid_serial, "Evaluate cells one at a time");
    std::string g_base, g_cands, g_workload, g_out = "out";
    auto* guided = dse_cmd->add_subcommand("guided", "Guided search on the utilization/blocking plane");
    guided->add_option("--base", g_base, "Starting SoC config")->required();
    guided->add_option("--candidates", g_cands, "candidates.json")->required();
    guided->add_option("--workload", g_workload, "Workload JSON")->required();
    guided->add_option("--out", g_out, "Output directory");

    std::string replay_sched = "met", replay_soc, replay_out;
    auto* replay = cli.add_subcommand("replay-canonical", "Schedule the 10-task canonical graph");
    replay->add_option("--scheduler", replay_sched, "met | etf | oracle");
    replay->add_option("--soc", replay_soc, "Three-PE config (default: shipped canonical_soc.json)");
    replay->add_option("--out", replay_out, "Also write gantt.csv here");

    std::string v_soc, v_workload;
    auto* validate = cli.add_subcommand("validate-config", "Load and validate configs");
    validate->add_option("--soc", v_soc, "SoC config JSON");
    validate->add_option("--workload", v_workload, "Workload JSON");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*sw) return cmd_sweep(sweep);
        if (*grid) return cmd_grid(grid_spec, grid_out, grid_serial);
        if (*guided) return cmd_guided(g_base, g_cands, g_workload, g_out);
        if (*replay) return cmd_replay(replay_sched, replay_soc, replay_out);
        if (*validate) return cmd_validate(v_soc, v_workload);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
