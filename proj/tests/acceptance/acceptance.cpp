// Acceptance suite: one PASS/FAIL line per criterion.
#include "oracles.hpp"

#include <dssim/app.hpp>
#include <dssim/dse.hpp>
#include <dssim/kernel.hpp>
#include <dssim/metrics.hpp>
#include <dssim/oracle.hpp>
#include <dssim/power.hpp>
#include <dssim/resource.hpp>
#include <dssim/scheduler.hpp>
#include <dssim/workload.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace dssim;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kCanonicalRuntimeS = 1.0;
constexpr double kTable5RuntimeS = 10.0;
constexpr double kTable5EqualUs = 1.0;   // "equal" at the table's 1 us resolution
constexpr double kTable5Band = 0.25;     // best-effort absolute band
constexpr double kMixtureTol = 0.05;
constexpr double kMeanTol = 0.05;
constexpr double kCvLo = 0.95;
constexpr double kCvHi = 1.05;
constexpr double kPowerRelTol = 1e-12;
constexpr int kPropertySeeds = 50;
constexpr double kR2Min = 0.98;
constexpr double kScalabilityRuntimeS = 120.0;
constexpr int kScalabilityRounds = 9;

int failures = 0;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool pass, const std::string& what) {
    std::printf("[%2d] %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void note(const std::string& s) { std::printf("       %s\n", s.c_str()); }

std::string f1(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.1f", v);
    return b;
}

void guard(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

resource::SocConfig soc16() { return resource::load_soc_config(app::data_dir() / "soc16.json"); }

// 1
void canonical_met() {
    const auto t0 = Clock::now();
    const auto soc = resource::load_soc_config(app::data_dir() / "canonical_soc.json");
    const auto canon = app::build_canonical_graph();
    const auto mapping = sched::single_job_mapping(canon.graph, soc, sched::MetScheduler{});
    bool ok = mapping.size() == 10;
    std::string got;
    for (int t = 0; t < 10; ++t) {
        const int pe = mapping.count(t) ? mapping.at(t) : -1;
        ok = ok && pe == oracle::argmin_pe(t);
        got += std::to_string(t) + "->P" + std::to_string(pe) + " ";
    }
    const double secs = seconds_since(t0);
    report(1, ok && secs < kCanonicalRuntimeS, "canonical MET places every task on its minimum-cost PE (" + f1(secs * 1000) + " ms)");
    note(got);
}

// 2
void canonical_relations() {
    const auto soc = resource::load_soc_config(app::data_dir() / "canonical_soc.json");
    const auto canon = app::build_canonical_graph();
    const SimTime met = kernel::single_job_makespan(soc, canon.graph, sched::MetScheduler{});
    const SimTime etf = kernel::single_job_makespan(soc, canon.graph, sched::EtfScheduler{});
    const auto opt = sched::oracle_optimal_table(canon.graph, soc);
    const SimTime replay = kernel::single_job_makespan(soc, canon.graph, sched::TableScheduler(opt.table));
    const bool ok = etf == met && opt.makespan <= etf && replay == opt.makespan && opt.exhaustive;
    report(2, ok, "canonical makespans MET " + f1(ns_to_us(met)) + " = ETF " + f1(ns_to_us(etf)) + ", oracle " +
                      f1(ns_to_us(opt.makespan)) + " <= ETF");
}

// 3
void table5() {
    const auto t0 = Clock::now();
    const auto soc = soc16();
    struct Row {
        const char* app;
        bool all_equal;
        double reference[3]; // MET, ETF, table
    };
    const Row rows[] = {{"wifi-tx", true, {69, 69, 69}},
                        {"wifi-rx", false, {389, 301, 288}},
                        {"range-detection", true, {177, 177, 177}},
                        {"pulse-doppler", false, {1665, 1045, 1000}}};
    bool ok = true;
    std::vector<std::string> lines;
    for (const auto& r : rows) {
        const auto g = app::build_benchmark(r.app);
        const double met = ns_to_us(kernel::single_job_makespan(soc, g, sched::MetScheduler{}));
        const double etf = ns_to_us(kernel::single_job_makespan(soc, g, sched::EtfScheduler{}));
        const double ilp = ns_to_us(sched::best_table(g, soc).makespan);
        bool order;
        if (r.all_equal) {
            order = std::abs(met - etf) <= kTable5EqualUs && std::abs(etf - ilp) <= kTable5EqualUs &&
                    std::abs(met - ilp) <= kTable5EqualUs;
        } else {
            order = ilp <= etf && etf <= met;
        }
        ok = ok && order;
        std::string line = std::string(r.app) + ": MET " + f1(met) + " ETF " + f1(etf) + " table " + f1(ilp) +
                           (order ? "  ordering ok" : "  ordering VIOLATED") + "  | vs reference:";
        const double ours[3] = {met, etf, ilp};
        for (int i = 0; i < 3; ++i) {
            const double dev = (ours[i] - r.reference[i]) / r.reference[i];
            line += " " + f1(100 * dev) + "%" + (std::abs(dev) <= kTable5Band ? "" : "(out of band)");
        }
        lines.push_back(line);
    }
    const double secs = seconds_since(t0);
    report(3, ok && secs < kTable5RuntimeS,
           "single-job scheduler orderings on the 16-PE SoC (" + f1(secs) + " s; absolute band best-effort)");
    for (const auto& l : lines) note(l);
}

// 4
void mixture_ratio() {
    workload::WorkloadSpec w;
    w.mixture = {{"wifi-tx", 0.8}, {"wifi-rx", 0.2}};
    w.jobs = 10000;
    w.seed = 2024;
    workload::JobGenerator gen(w);
    double tx = 0, rx = 0;
    while (auto a = gen.next()) (a->app_index == 0 ? tx : rx) += 1;
    const double ratio = tx / rx;
    report(4, std::abs(ratio - 4.0) / 4.0 <= kMixtureTol,
           "TX:RX count ratio " + std::to_string(ratio).substr(0, 5) + " over 10000 jobs (target 4)");
}

// 5
void exponential_moments() {
    workload::WorkloadSpec w;
    w.mixture = {{"wifi-tx", 1.0}};
    w.rate_jobs_per_ms = 2.0;
    w.jobs = 10000;
    w.seed = 99;
    workload::JobGenerator gen(w);
    std::vector<double> xs;
    while (auto a = gen.next()) xs.push_back(a->interarrival_us);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
    const double cv = std::sqrt(var) / mean;
    const double expect = 1000.0 / w.rate_jobs_per_ms;
    report(5, std::abs(mean - expect) / expect <= kMeanTol && cv >= kCvLo && cv <= kCvHi,
           "inter-arrival mean " + f1(mean) + " us (1/rate " + f1(expect) + "), CV " + std::to_string(cv).substr(0, 5));
}

// 6
void governors() {
    const auto w = workload::load_workload(app::data_dir() / "workloads" / "dtpm.json");
    const auto apps = workload::build_templates(w);
    double lat[3], pw[3];
    const char* names[3] = {"performance", "ondemand", "powersave"};
    for (int i = 0; i < 3; ++i) {
        auto soc = soc16();
        for (auto& pe : soc.pes) {
            if (pe.type == resource::PeType::GeneralCore) pe.dvfs_policy = resource::DvfsPolicy::parse(names[i]);
        }
        const auto L = kernel::run(soc, w, sched::EtfScheduler{}, {false, false, false});
        const auto s = metrics::summarize(L);
        lat[i] = s.avg_latency_us.value_or(1e300);
        pw[i] = s.avg_power_w;
    }
    const bool ok = lat[0] <= lat[1] && lat[1] <= lat[2] && pw[2] <= pw[0] && pw[2] <= pw[1];
    report(6, ok, "latency perf " + f1(lat[0]) + " <= ondemand " + f1(lat[1]) + " <= powersave " + f1(lat[2]) +
                      " us; powersave power " + std::to_string(pw[2]).substr(0, 5) + " W is the minimum");
}

// 7
void ondemand_cases() {
    const resource::OndemandThresholds th{0.3, 0.8};
    const bool down = power::ondemand_step(4, 7, 0.1, th) == 3 && power::ondemand_step(0, 7, 0.0, th) == 0;
    const bool up = power::ondemand_step(2, 7, 0.95, th) == 7 && power::ondemand_step(0, 4, 0.81, th) == 4;
    const bool hold = power::ondemand_step(3, 7, 0.5, th) == 3 && power::ondemand_step(5, 7, 0.3, th) == 5 &&
                      power::ondemand_step(5, 7, 0.8, th) == 5;
    report(7, down && up && hold, "ondemand step-down, jump-to-max and hold");
}

// 8
void power_laws() {
    resource::PeDescriptor pe;
    pe.power = {3.7e-10, 0.63, 0.001, 0.02};
    const resource::OppPoint base{0.9, 1.2e9};
    const double p0 = power::dynamic_power(pe, base, 1.0);
    bool ok = p0 > 0;
    for (double k : {2.0, 0.5, 4.0}) {
        ok = ok && power::dynamic_power(pe, {base.voltage_v, base.frequency_hz * k}, 1.0) == p0 * k;
        ok = ok && power::dynamic_power(pe, {base.voltage_v * k, base.frequency_hz}, 1.0) == p0 * k * k;
    }
    for (double k : {1.3, 0.77, 1.6}) {
        const double pf = power::dynamic_power(pe, {base.voltage_v, base.frequency_hz * k}, 1.0);
        const double pv = power::dynamic_power(pe, {base.voltage_v * k, base.frequency_hz}, 1.0);
        ok = ok && std::abs(pf - p0 * k) <= kPowerRelTol * p0 * k;
        ok = ok && std::abs(pv - p0 * k * k) <= kPowerRelTol * p0 * k * k;
    }
    ok = ok && power::dynamic_power(pe, base, 0.0) == 0.0;
    report(8, ok, "dynamic power linear in f, quadratic in V, zero when idle");
}

// 9
void thermal() {
    bool fixed_point = true;
    for (double dt : {1.0, 1e4, 1e7}) {
        const power::ThermalModel m{12.0, 0.1, 25.0, 95.0, 5.0};
        const auto s = power::step_thermal(m, 0.0, dt, {25.0, false});
        fixed_point = fixed_point && s.temperature_c == 25.0 && !s.throttled;
    }

    const auto soc = resource::load_soc_config(app::data_dir() / "soc_hot.json");
    const auto w = workload::load_workload(app::data_dir() / "workloads" / "thermal.json");
    const auto L = kernel::run(soc, w, sched::EtfScheduler{}, {false, true, false});

    // Largest single-step rise, bounding static power at 150 C.
    double bound_rise = 0.0;
    for (const auto& zone : soc.thermal_zones()) {
        double p_max = 0.0;
        for (const auto& pe : soc.pes) {
            if (pe.thermal_zone() != zone) continue;
            const auto& top = pe.opps.back();
            p_max += pe.capacity * pe.power.cap_f * top.voltage_v * top.voltage_v * pe.power.activity * top.frequency_hz +
                     top.voltage_v * (pe.power.leak_a * 150.0 + pe.power.leak_b);
        }
        const auto [r, c] = soc.thermal.rc_for(zone);
        const double k = std::min(1.0, soc.dtpm_epoch_us * 1e-6 / (r * c));
        bound_rise = std::max(bound_rise, k * (r * p_max + soc.thermal.ambient_c - soc.thermal.trip_c));
    }
    const double ceiling = soc.thermal.trip_c + bound_rise;

    std::map<std::string, bool> latched;
    bool opp_ok = true;
    std::size_t throttled_rows = 0;
    for (const auto& row : L.traces) {
        const auto it = std::find_if(soc.pes.begin(), soc.pes.end(), [&](const auto& p) { return p.name == row.pe_or_cluster; });
        if (it == soc.pes.end() || it->type != resource::PeType::GeneralCore) continue;
        bool& th = latched[it->name];
        th = row.temp_c >= soc.thermal.trip_c || (th && row.temp_c >= soc.thermal.trip_c - soc.thermal.hysteresis_c);
        if (th) {
            ++throttled_rows;
            opp_ok = opp_ok && row.opp_index == 0;
        }
    }
    const bool ok = fixed_point && L.max_temperature_c <= ceiling && L.throttled_epochs > 0 && throttled_rows > 0 && opp_ok;
    report(9, ok, "zero-power fixed point is ambient; peak " + f1(L.max_temperature_c) + " C <= " + f1(ceiling) +
                      " C; OPP 0 in all " + std::to_string(throttled_rows) + " throttled rows");
}

// 10
void structural() {
    const auto soc = soc16();
    std::mt19937_64 rng(7);
    bool ok = true;
    std::string detail;
    const std::vector<std::string> names = {"wifi-tx", "wifi-rx", "range-detection", "sc-tx", "sc-rx"};
    for (int s = 0; s < kPropertySeeds; ++s) {
        workload::WorkloadSpec w;
        std::uniform_real_distribution<double> u(0.1, 1.0);
        for (const auto& n : names) w.mixture.push_back({n, u(rng)});
        double sum = 0;
        for (auto& [_, p] : w.mixture) sum += p;
        for (auto& [_, p] : w.mixture) p /= sum;
        w.rate_jobs_per_ms = std::uniform_real_distribution<double>(0.5, 6.0)(rng);
        w.seed = rng();
        if (s % 2 == 0) {
            w.jobs = 120;
        } else {
            w.duration_us = 40000.0;
        }
        const auto apps = workload::build_templates(w);
        std::map<std::string, const app::AppTemplate*> by_name;
        for (const auto& a : apps) by_name[a.name()] = &a;
        const sched::MetScheduler met;
        const sched::EtfScheduler etf;
        const sched::Scheduler& sch = s % 3 == 0 ? static_cast<const sched::Scheduler&>(met) : etf;
        const auto L = kernel::run(soc, w, sch, {true, false, false});
        const auto r = oracle::check_structure(L, soc, by_name);
        if (!(r.conserved && r.no_overlap && r.precedence)) {
            ok = false;
            detail = "seed " + std::to_string(s) + ": " + r.detail;
            break;
        }
    }
    report(10, ok, "conservation, slot non-overlap and precedence over " + std::to_string(kPropertySeeds) + " random runs" +
                       (detail.empty() ? "" : " (" + detail + ")"));
}

// 11
void pareto_histogram() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coord(0, 40);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 100; ++i) pts.push_back({coord(rng) / 4.0, coord(rng) / 4.0});
        auto got = metrics::pareto_frontier(pts);
        auto want = oracle::brute_pareto(pts);
        std::vector<std::pair<double, double>> g, wv;
        for (auto i : got) g.push_back(pts[i]);
        for (auto i : want) wv.push_back(pts[i]);
        std::sort(g.begin(), g.end());
        std::sort(wv.begin(), wv.end());
        ok = g == wv;
    }
    bool hist_ok = true;
    std::uniform_real_distribution<double> val(-5.0, 20.0);
    for (int trial = 0; trial < 20 && hist_ok; ++trial) {
        std::vector<double> v;
        for (int i = 0; i < 100; ++i) v.push_back(std::round(val(rng) * 4.0) / 4.0);
        const double width = 0.5 + trial * 0.25;
        std::size_t total = 0;
        for (const auto& b : metrics::histogram(v, width)) {
            hist_ok = hist_ok && b.count == oracle::count_in(v, b.lower, width);
            total += b.count;
        }
        hist_ok = hist_ok && total == v.size();
    }
    report(11, ok && hist_ok, "Pareto frontier equals brute-force domination; histogram equals direct counts");
}

// 12
void grid_trend() {
    const auto spec = dse::load_grid_spec(app::data_dir() / "table6" / "grid.json");
    const auto res = dse::grid_search(spec);
    const auto frontier = dse::grid_pareto(res);
    bool decreasing = true;
    std::string energies;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double e = res[i].energy_per_job_uj.value_or(1e300);
        energies += res[i].name + "=" + f1(e) + " ";
        if (i > 0 && !(e < res[i - 1].energy_per_job_uj.value_or(-1))) decreasing = false;
    }
    const bool c3 = std::find(frontier.begin(), frontier.end(), 2u) != frontier.end();
    report(12, decreasing && c3,
           std::string("energy/job strictly decreasing: ") + (decreasing ? "yes" : "no") + "; config-3 on frontier: " +
               (c3 ? "yes" : "no"));
    note(energies + "uJ/job");
}

// 13
void guided() {
    const auto d = app::data_dir() / "table6";
    const auto spec = dse::load_guided_spec(d / "config1.json", d / "candidates.json", d / "workload.json");
    const auto r = dse::guided_search(spec);
    const int fft = r.counts.count("fft-acc") ? r.counts.at("fft-acc") : -1;
    const int vit = r.counts.count("viterbi-acc") ? r.counts.at("viterbi-acc") : -1;
    // Viterbi goes 0 -> 1 once, then is frozen and never changes.
    bool vit_frozen = false;
    int prev = 0, additions = 0;
    for (const auto& s : r.trace) {
        const int v = s.counts.at("viterbi-acc");
        if (v != prev) ++additions;
        prev = v;
        if (v == 1 && std::find(s.frozen.begin(), s.frozen.end(), "viterbi-acc") != s.frozen.end()) vit_frozen = true;
    }
    const bool ok = fft == 2 && vit == 1 && additions == 1 && vit_frozen;
    report(13, ok, "guided search ends at (FFT " + std::to_string(fft) + ", Viterbi " + std::to_string(vit) +
                       "), expected (2, 1); Viterbi frozen after one addition: " + (additions == 1 && vit_frozen ? "yes" : "no"));
    for (const auto& s : r.trace) note("step " + std::to_string(s.iteration) + ": " + s.action);
    note("stop: " + r.stop_reason);
}

// 14
void scalability() {
    const auto t_all = Clock::now();
    workload::WorkloadSpec w;
    w.mixture = {{"wifi-tx", 0.3}, {"wifi-rx", 0.3}, {"range-detection", 0.3}, {"pulse-doppler", 0.1}};
    w.rate_jobs_per_ms = 1.0;
    w.seed = 3;
    const auto base = soc16();
    const sched::EtfScheduler etf;
    struct Point {
        resource::SocConfig soc;
        workload::WorkloadSpec spec;
        double best = 1e300;
    };

    std::vector<Point> jobs_pts, pe_pts;
    std::vector<double> xj, xp;
    for (std::uint64_t n : {500u, 1000u, 2000u, 4000u}) {
        auto spec = w;
        spec.jobs = n;
        xj.push_back(static_cast<double>(n));
        jobs_pts.push_back({base, spec});
    }
    for (int scale : {2, 4, 7}) { // 16, 32, 56 PEs
        auto soc = dse::with_counts(base, {{"big-core", 2 * scale}, {"little-core", 2 * scale},
                                           {"scrambler-acc", scale}, {"fft-acc", 2 * scale},
                                           {"viterbi-acc", scale}});
        auto spec = w;
        spec.jobs = 2000;
        spec.rate_jobs_per_ms = w.rate_jobs_per_ms * scale / 2.0;
        xp.push_back(static_cast<double>(soc.pes.size()));
        pe_pts.push_back({std::move(soc), spec});
    }
    // Rounds visit every point in turn so host slowdowns spread across the sweep.
    bool completed = true;
    for (int round = 0; round < kScalabilityRounds; ++round) {
        for (auto* pts : {&jobs_pts, &pe_pts}) {
            for (auto& p : *pts) {
                const auto t0 = Clock::now();
                const auto L = kernel::run(p.soc, p.spec, etf, {false, false, false});
                p.best = std::min(p.best, seconds_since(t0));
                completed = completed && L.completed > 0;
            }
        }
    }
    std::vector<double> yj, yp;
    for (const auto& p : jobs_pts) yj.push_back(p.best);
    for (const auto& p : pe_pts) yp.push_back(p.best);
    const double r2j = oracle::r_squared(xj, yj);
    const double r2p = oracle::r_squared(xp, yp);
    const double secs = seconds_since(t_all);
    report(14, completed && r2j > kR2Min && r2p > kR2Min && secs < kScalabilityRuntimeS,
           "wall time linear in jobs (R^2 " + std::to_string(r2j).substr(0, 6) + ") and in PEs (R^2 " +
               std::to_string(r2p).substr(0, 6) + "), " + f1(secs) + " s");
    std::string a, b;
    for (std::size_t i = 0; i < xj.size(); ++i) a += f1(xj[i]) + ":" + std::to_string(yj[i]).substr(0, 6) + "s ";
    for (std::size_t i = 0; i < xp.size(); ++i) b += f1(xp[i]) + ":" + std::to_string(yp[i]).substr(0, 6) + "s ";
    note("jobs " + a);
    note("PEs  " + b);
}

// 15
void not_reproducible() {
    std::printf("[15] N/A   not reproducible at desk scale: hardware validation error tables, the exact DVFS EDP\n"
                "       optimum and the speedup against a cycle-accurate simulator depend on unpublished model\n"
                "       coefficients and external tools; covered instead by criteria 6-9 and 14.\n");
}

} // namespace

int main() {
    guard(1, canonical_met);
    guard(2, canonical_relations);
    guard(3, table5);
    guard(4, mixture_ratio);
    guard(5, exponential_moments);
    guard(6, governors);
    guard(7, ondemand_cases);
    guard(8, power_laws);
    guard(9, thermal);
    guard(10, structural);
    guard(11, pareto_histogram);
    guard(12, grid_trend);
    guard(13, guided);
    guard(14, scalability);
    not_reproducible();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
