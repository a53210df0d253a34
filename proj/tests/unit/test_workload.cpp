#include <doctest.h>

#include "fixtures.hpp"

#include <dssim/workload.hpp>

#include <cmath>
#include <map>

using namespace dssim;
using namespace dssim::workload;
using fixtures::json;

namespace {

WorkloadSpec spec_of(std::vector<std::pair<std::string, double>> mix, double rate, std::uint64_t jobs,
                     std::uint64_t seed = 1) {
    WorkloadSpec w;
    w.mixture = std::move(mix);
    w.rate_jobs_per_ms = rate;
    w.jobs = jobs;
    w.seed = seed;
    return w;
}

std::vector<Arrival> drain(const WorkloadSpec& w) {
    JobGenerator g(w);
    std::vector<Arrival> out;
    while (auto a = g.next()) out.push_back(*a);
    return out;
}

} // namespace

TEST_CASE("job limit and ids") {
    const auto a = drain(spec_of({{"wifi-tx", 1.0}}, 1.0, 25));
    REQUIRE(a.size() == 25);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].job_id == i);
        if (i > 0) CHECK(a[i].time >= a[i - 1].time);
    }
    CHECK(a[0].time > 0);
}

TEST_CASE("duration limit") {
    WorkloadSpec w = spec_of({{"wifi-tx", 1.0}}, 2.0, 0);
    w.jobs.reset();
    w.duration_us = 10000.0;
    const auto a = drain(w);
    CHECK(!a.empty());
    for (const auto& x : a) CHECK(x.time <= us_to_ns(10000.0));
    // Roughly rate x duration arrivals.
    CHECK(a.size() > 5);
    CHECK(a.size() < 45);
}

TEST_CASE("fixed arrivals are evenly spaced") {
    auto w = spec_of({{"wifi-rx", 1.0}}, 4.0, 10);
    w.distribution = Distribution::Fixed;
    const auto a = drain(w);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].time == 250000 * (i + 1));
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    const auto w = spec_of({{"wifi-tx", 0.5}, {"wifi-rx", 0.5}}, 1.0, 200, 17);
    const auto a = drain(w);
    const auto b = drain(w);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].time == b[i].time && a[i].app_index == b[i].app_index;
    CHECK(same);
    auto w2 = w;
    w2.seed = 18;
    const auto c = drain(w2);
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) differ = differ || a[i].time != c[i].time;
    CHECK(differ);
}

TEST_CASE("mixture and arrival streams are independent") {
    // Changing only the mixture must not move arrival times.
    const auto a = drain(spec_of({{"wifi-tx", 0.5}, {"wifi-rx", 0.5}}, 1.0, 100, 3));
    const auto b = drain(spec_of({{"wifi-tx", 0.9}, {"wifi-rx", 0.1}}, 1.0, 100, 3));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].time == b[i].time);
}

TEST_CASE("mixture frequencies") {
    const auto a = drain(spec_of({{"wifi-tx", 0.8}, {"wifi-rx", 0.2}}, 1.0, 20000, 5));
    double tx = 0;
    for (const auto& x : a) tx += x.app_index == 0;
    CHECK(tx / 20000.0 == doctest::Approx(0.8).epsilon(0.02));

    // Zero-probability entries are never drawn.
    const auto b = drain(spec_of({{"wifi-tx", 0.0}, {"wifi-rx", 1.0}}, 1.0, 1000, 5));
    for (const auto& x : b) CHECK(x.app_index == 1);
}

TEST_CASE("uniform stream stays in [0, 1)") {
    RngStream r(123, 4);
    double lo = 1, hi = 0, sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(validate(spec_of({}, 1.0, 10)), ConfigError);
    CHECK_THROWS_AS(validate(spec_of({{"wifi-tx", 0.5}}, 1.0, 10)), ConfigError);
    CHECK_THROWS_AS(validate(spec_of({{"wifi-tx", -0.5}, {"wifi-rx", 1.5}}, 1.0, 10)), ConfigError);
    CHECK_THROWS_AS(validate(spec_of({{"wifi-tx", 1.0}}, 0.0, 10)), ConfigError);
    auto both = spec_of({{"wifi-tx", 1.0}}, 1.0, 10);
    both.duration_us = 5.0;
    CHECK_THROWS_AS(validate(both), ConfigError);
    auto neither = both;
    neither.jobs.reset();
    neither.duration_us.reset();
    CHECK_THROWS_AS(validate(neither), ConfigError);
}

TEST_CASE("json parsing") {
    const json j = {{"mixture", {{"wifi-tx", 0.25}, {"wifi-rx", 0.75}}},
                    {"rate_jobs_per_ms", 2.5},
                    {"jobs", 40},
                    {"seed", 9},
                    {"app_params", {{"wifi_chains", 3}}}};
    const auto w = workload_from_json(j);
    CHECK(w.rate_jobs_per_ms == 2.5);
    CHECK(w.jobs == 40u);
    CHECK(w.seed == 9u);
    CHECK(w.params.wifi_chains == 3);
    CHECK(build_templates(w)[0].size() + build_templates(w)[1].size() == 16 + 18);
    const auto back = workload_from_json(to_json(w));
    CHECK(back.mixture == w.mixture);
    CHECK(back.params.wifi_chains == 3);

    auto bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_AS((void)workload_from_json(bad), ConfigError);
    bad = j;
    bad["app_params"]["nope"] = 1;
    CHECK_THROWS_AS((void)workload_from_json(bad), ConfigError);
    bad = j;
    bad["distribution"] = "pareto";
    CHECK_THROWS_AS((void)workload_from_json(bad), ConfigError);
    bad = j;
    bad["mixture"] = {{"wifi-tx", 1.0}, {"nonexistent-app", 0.0}};
    CHECK_THROWS_AS(validate(workload_from_json(bad)), ConfigError);
}

TEST_CASE("shipped workloads load") {
    for (const auto* f : {"table6/workload.json", "workloads/fig11a.json", "workloads/fig11b.json",
                          "workloads/fig11c.json", "workloads/fig11d.json", "workloads/dtpm.json",
                          "workloads/thermal.json"}) {
        CAPTURE(f);
        const auto w = load_workload(app::data_dir() / f);
        CHECK_NOTHROW(validate(w));
        CHECK_NOTHROW((void)build_templates(w));
    }
}

TEST_CASE("study mixtures") {
    CHECK(mixture_for_study("fig11b").mixture[0] == std::pair<std::string, double>{"wifi-tx", 0.8});
    CHECK(mixture_for_study("fig11d").mixture.size() == 4);
    CHECK_THROWS_AS((void)mixture_for_study("fig99"), ConfigError);
}
