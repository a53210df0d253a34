#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <dssim/metrics.hpp>

#include <random>
#include <sstream>

using namespace dssim;
using metrics::MetricsLedger;

namespace {

MetricsLedger two_job_ledger() {
    MetricsLedger L;
    L.injected = 3;
    L.completed = 2;
    L.sim_end = us_to_ns(10'000.0);
    L.jobs = {{0, "wifi-tx", 0, us_to_ns(4'000.0)},
              {1, "wifi-tx", us_to_ns(1'000.0), us_to_ns(8'200.0)},
              {2, "wifi-rx", us_to_ns(9'000.0), std::nullopt}};
    L.energy_dynamic_uj = 10'000.0;
    L.energy_static_uj = 3'700.0;
    metrics::PeStats a;
    a.id = 0;
    a.name = "A";
    a.cluster = "x";
    a.busy_ns = 5e6;
    a.blocking = {3, 12};
    a.busy_by_kind_ns = {{"k1", 4e6}, {"k2", 1e6}};
    metrics::PeStats b;
    b.id = 1;
    b.name = "B";
    b.cluster = "x";
    b.capacity = 2;
    b.busy_ns = 1e7;
    b.blocking = {1, 4};
    b.busy_by_kind_ns = {{"k1", 1e7}};
    L.pes = {a, b};
    return L;
}

} // namespace

TEST_CASE("summary figures of merit") {
    const auto L = two_job_ledger();
    const auto s = metrics::summarize(L, 2.5);
    CHECK(s.jobs_injected == 3);
    CHECK(s.jobs_completed == 2);
    CHECK(s.jobs_in_flight == 1);
    CHECK(s.sim_time_us == doctest::Approx(10'000.0));
    // Latencies 4000 and 7200 us.
    REQUIRE(s.avg_latency_us);
    CHECK(*s.avg_latency_us == doctest::Approx(5'600.0));
    CHECK(s.energy_uj == doctest::Approx(13'700.0));
    // 13.7 mJ x 5.6 ms.
    REQUIRE(s.edp_mj_ms);
    CHECK(*s.edp_mj_ms == doctest::Approx(76.72));
    CHECK(s.throughput_jobs_per_ms == doctest::Approx(0.2));
    CHECK(s.avg_power_w == doctest::Approx(1.37));
    CHECK(*s.ppw == doctest::Approx(0.2 / 1.37));
    CHECK(*s.energy_per_job_uj == doctest::Approx(6'850.0));
    CHECK(*s.eap == doctest::Approx(6'850.0 * 2.5));
    CHECK(s.utilization.at("A") == doctest::Approx(0.5));
    CHECK(s.utilization.at("B") == doctest::Approx(0.5));
    CHECK(s.blocking.at("A") == doctest::Approx(0.25));
}

TEST_CASE("summary with nothing completed") {
    MetricsLedger L;
    L.injected = 1;
    L.jobs = {{0, "x", 0, std::nullopt}};
    const auto s = metrics::summarize(L);
    CHECK_FALSE(s.avg_latency_us);
    CHECK_FALSE(s.energy_per_job_uj);
    CHECK_FALSE(s.edp_mj_ms);
    CHECK_FALSE(s.eap);
    CHECK(s.throughput_jobs_per_ms == 0.0);
}

TEST_CASE("cluster plane aggregates over PEs") {
    const auto plane = metrics::cluster_plane(two_job_ledger());
    REQUIRE(plane.size() == 1);
    CHECK(plane[0].cluster == "x");
    // 15 ms busy over 3 slots x 10 ms.
    CHECK(plane[0].utilization == doctest::Approx(0.5));
    CHECK(plane[0].blocking == doctest::Approx(4.0 / 16.0));
    CHECK(plane[0].busy_by_kind_ns.at("k1") == doctest::Approx(1.4e7));
}

TEST_CASE("summary json round trip") {
    const auto s = metrics::summarize(two_job_ledger(), 3.0);
    CHECK(metrics::summary_from_json(metrics::to_json(s)) == s);
    const auto empty = metrics::summarize(MetricsLedger{});
    CHECK(metrics::summary_from_json(metrics::to_json(empty)) == empty);
    CHECK(metrics::to_json(empty)["avg_latency_us"].is_null());

    fixtures::TempDir dir("summary");
    metrics::write_summary_json(s, dir / "s.json");
    CHECK(metrics::read_summary_json(dir / "s.json") == s);
    CHECK_THROWS_AS((void)metrics::read_summary_json(dir / "none.json"), ConfigError);
    std::ofstream(dir / "bad.json") << "[1,";
    CHECK_THROWS_AS((void)metrics::read_summary_json(dir / "bad.json"), ConfigError);
}

TEST_CASE("pareto frontier small examples") {
    using P = std::vector<std::pair<double, double>>;
    CHECK(metrics::pareto_frontier({}).empty());
    CHECK(metrics::pareto_frontier(P{{1, 1}}) == std::vector<std::size_t>{0});
    // (3,3) is dominated by (2,2); (1,5) and (5,1) are trade-offs.
    CHECK(metrics::pareto_frontier(P{{3, 3}, {1, 5}, {2, 2}, {5, 1}}) == std::vector<std::size_t>{1, 2, 3});
    // Duplicates collapse to the first.
    CHECK(metrics::pareto_frontier(P{{2, 2}, {2, 2}, {1, 3}}) == std::vector<std::size_t>{2, 0});
    // Equal x: only the smaller y survives.
    CHECK(metrics::pareto_frontier(P{{1, 4}, {1, 2}}) == std::vector<std::size_t>{1});
}

TEST_CASE("pareto frontier matches brute force") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coord(0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> pts(1 + trial % 40);
        for (auto& p : pts) p = {coord(rng), coord(rng)};
        auto got = metrics::pareto_frontier(pts);
        auto want = oracle::brute_pareto(pts);
        std::vector<std::pair<double, double>> a, b;
        for (auto i : got) a.push_back(pts[i]);
        for (auto i : want) b.push_back(pts[i]);
        std::sort(b.begin(), b.end());
        CAPTURE(trial);
        CHECK(a == b);
    }
}

TEST_CASE("histogram bins") {
    CHECK(metrics::histogram({}, 1.0).empty());
    CHECK_THROWS_AS((void)metrics::histogram({1.0}, 0.0), ConfigError);
    const std::vector<double> v = {1.0, 1.9, 2.0, 5.5, 5.0};
    const auto h = metrics::histogram(v, 1.0);
    REQUIRE(h.size() == 5);
    CHECK(h.front().lower == 1.0);
    CHECK(h.back().lower == 5.0);
    for (const auto& b : h) CHECK(b.count == oracle::count_in(v, b.lower, 1.0));
    std::uint64_t total = 0;
    for (const auto& b : h) total += b.count;
    CHECK(total == v.size());
}

TEST_CASE("gantt csv is sorted by start, pe, slot") {
    MetricsLedger L;
    L.gantt = {{0, 1, 2, 0, 3000, 4000, 1, 0}, {0, 0, 1, 0, 1000, 2000, 0, 0}, {1, 0, 0, 0, 3000, 3500, 0, 0}};
    fixtures::TempDir dir("gantt");
    metrics::write_gantt_csv(L, dir / "g.csv");
    std::istringstream in(fixtures::read_file(dir / "g.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "job,task,pe,slot,start_us,end_us,opp");
    std::getline(in, line);
    CHECK(line == "0,0,1,0,1.000,2.000,0");
    std::getline(in, line);
    CHECK(line == "1,0,0,0,3.000,3.500,0");
    std::getline(in, line);
    CHECK(line == "0,1,2,0,3.000,4.000,1");
}

TEST_CASE("empty ledgers still get headers") {
    fixtures::TempDir dir("empty");
    const MetricsLedger L;
    metrics::export_run(L, metrics::summarize(L), dir / "out");
    CHECK(fixtures::read_file(dir / "out/gantt.csv") == "job,task,pe,slot,start_us,end_us,opp\n");
    CHECK(fixtures::read_file(dir / "out/traces.csv") == "time_us,pe_or_cluster,dyn_w,static_w,temp_c,opp_index\n");
    CHECK(std::filesystem::exists(dir / "out/summary.json"));
    metrics::write_events_csv(L, dir / "ev.csv");
    CHECK(fixtures::read_file(dir / "ev.csv") == "time_us,event,job,task,pe,opp\n");
}

TEST_CASE("events csv leaves absent fields empty") {
    MetricsLedger L;
    L.events.push_back({2500, "dtpm", -1, -1, -1, -1});
    L.events.push_back({3000, "start", 4, 2, 1, 3});
    fixtures::TempDir dir("events");
    metrics::write_events_csv(L, dir / "e.csv");
    CHECK(fixtures::read_file(dir / "e.csv") ==
          "time_us,event,job,task,pe,opp\n2.500,dtpm,,,,\n3.000,start,4,2,1,3\n");
}

TEST_CASE("fixed precision formatting") {
    CHECK(metrics::fmt(1.0) == "1.000");
    CHECK(metrics::fmt(2.0 / 3.0, 2) == "0.67");
    CHECK(metrics::fmt(-0.5, 1) == "-0.5");
}
