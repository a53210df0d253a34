#include <doctest.h>

#include "fixtures.hpp"

#include <dssim/dse.hpp>

using namespace dssim;

namespace {

std::filesystem::path table6() { return app::data_dir() / "table6"; }

workload::WorkloadSpec small_workload(double rate, std::uint64_t jobs) {
    workload::WorkloadSpec w;
    w.mixture = {{"wifi-tx", 0.2}, {"wifi-rx", 0.8}};
    w.rate_jobs_per_ms = rate;
    w.jobs = jobs;
    w.seed = 42;
    return w;
}

} // namespace

TEST_CASE("area model") {
    const auto c1 = resource::load_soc_config(table6() / "config1.json");
    CHECK(dse::area_model(c1) == doctest::Approx(14.94));
    double pes = 0.0;
    for (const auto& pe : c1.pes) pes += pe.area_mm2;
    CHECK(dse::area_model(c1, 1.5) == doctest::Approx(c1.uncore_area_mm2 + 1.5 * pes));
    const auto c3 = resource::load_soc_config(table6() / "config3.json");
    CHECK(dse::area_model(c3) == doctest::Approx(14.94 + 2 * 0.37 + 0.27));
}

TEST_CASE("with_counts adds, removes and renumbers") {
    const auto base = fixtures::soc16();
    const auto cands = dse::load_candidates(table6() / "candidates.json");
    const auto soc = dse::with_counts(base, {{"fft-acc", 1}, {"viterbi-acc", 3}, {"scrambler-acc", 0}}, cands);
    const auto counts = dse::subtype_counts(soc);
    CHECK(counts.at("fft-acc") == 1);
    CHECK(counts.at("viterbi-acc") == 3);
    CHECK_FALSE(counts.contains("scrambler-acc"));
    CHECK(counts.at("big-core") == 4);
    for (std::size_t i = 0; i < soc.pes.size(); ++i) CHECK(soc.pes[i].id == static_cast<PeId>(i));

    // A subtype absent from the base comes from the template.
    const auto c1 = resource::load_soc_config(table6() / "config1.json");
    const auto grown = dse::with_counts(c1, {{"fft-acc", 2}}, cands);
    CHECK(dse::subtype_counts(grown).at("fft-acc") == 2);
    CHECK_THROWS_AS((void)dse::with_counts(c1, {{"fft-acc", 2}}), ConfigError);
    CHECK_THROWS_AS((void)dse::with_counts(c1, {{"fft-acc", -1}}, cands), ConfigError);
}

TEST_CASE("dvfs sweep cell count") {
    const auto base = fixtures::soc16();
    // 8 big OPPs x 5 LITTLE OPPs x 4 big counts x 4 LITTLE counts, plus three governors.
    CHECK(dse::dvfs_cells(base).size() == 8 * 5 * 4 * 4 + 3);
    dse::DvfsSweep s;
    s.include_governors = false;
    s.min_big = 4;
    s.min_little = 2;
    const auto cells = dse::dvfs_cells(base, s);
    CHECK(cells.size() == 8 * 5 * 1 * 3);
    CHECK(cells.front().name == "big4@600_little2@600");
    const auto counts = dse::subtype_counts(cells.front().soc);
    CHECK(counts.at("little-core") == 2);
    CHECK(counts.at("fft-acc") == 4);

    const auto c1 = resource::load_soc_config(table6() / "config1.json");
    auto no_little = dse::with_counts(c1, {{"little-core", 0}});
    CHECK_THROWS_AS((void)dse::dvfs_cells(no_little), ConfigError);
}

TEST_CASE("grid spec loading") {
    const auto spec = dse::load_grid_spec(table6() / "grid.json");
    REQUIRE(spec.cells.size() == 6);
    CHECK(spec.cells[2].name == "config-3");
    CHECK(dse::subtype_counts(spec.cells[2].soc).at("fft-acc") == 2);
    const auto full = dse::load_grid_spec(table6() / "grid_full.json");
    CHECK(full.cells.size() == 5 * 4);

    fixtures::TempDir dir("grid");
    fixtures::write_json(dir / "g.json", {{"base", (table6() / "config1.json").string()},
                                          {"workload", (table6() / "workload.json").string()}});
    CHECK_THROWS_AS((void)dse::load_grid_spec(dir / "g.json"), ConfigError);
    fixtures::write_json(dir / "h.json", {{"base", (table6() / "config1.json").string()},
                                          {"workload", (table6() / "workload.json").string()},
                                          {"cells", fixtures::json::array({{{"name", "x"}, {"counts", {}}}})},
                                          {"bogus", 1}});
    CHECK_THROWS_AS((void)dse::load_grid_spec(dir / "h.json"), ConfigError);
}

TEST_CASE("grid search: parallel equals serial, single cell, failure isolation") {
    auto spec = dse::load_grid_spec(table6() / "grid.json");
    spec.workload = small_workload(2.0, 40);
    const auto par = dse::grid_search(spec);
    const auto ser = dse::grid_search_serial(spec);
    CHECK(par == ser);
    REQUIRE(par.size() == 6);
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].index == i);
        CHECK(par[i].error.empty());
        CHECK(par[i].completed == 40);
        CHECK(par[i] == dse::evaluate_cell(spec, i));
    }

    auto one = spec;
    one.cells.resize(1);
    const auto single = dse::grid_search(one);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == par[0]);
    CHECK(dse::grid_pareto(single) == std::vector<std::size_t>{0});

    // A cell without the cores the workload needs fails alone.
    auto broken = one;
    const auto cands = dse::load_candidates(table6() / "candidates.json");
    broken.cells.push_back({"no-cores", dse::with_counts(spec.cells[0].soc,
                                                         {{"big-core", 0}, {"little-core", 0}, {"fft-acc", 1}}, cands)});
    const auto mixed = dse::grid_search(broken);
    CHECK(mixed[0].error.empty());
    CHECK_FALSE(mixed[1].error.empty());
    CHECK(dse::grid_pareto(mixed) == std::vector<std::size_t>{0});
}

TEST_CASE("grid csv writers") {
    std::vector<dse::CellResult> r(2);
    r[0].name = "a";
    r[0].area_mm2 = 10.0;
    r[0].energy_per_job_uj = 5.0;
    r[1].name = "b";
    r[1].area_mm2 = 12.0;
    r[1].error = "boom";
    fixtures::TempDir dir("gridcsv");
    dse::write_grid_results(r, dir / "r.csv");
    dse::write_pareto(r, dse::grid_pareto(r), dir / "p.csv");
    const auto text = fixtures::read_file(dir / "r.csv");
    CHECK(text.find("boom") != std::string::npos);
    const auto p = fixtures::read_file(dir / "p.csv");
    CHECK(p.find("a") != std::string::npos);
    CHECK(p.find(",b,") == std::string::npos);
}

TEST_CASE("guided search stops at once on an idle system") {
    auto spec = dse::load_guided_spec(table6() / "config1.json", table6() / "candidates.json",
                                      table6() / "workload.json");
    spec.workload = small_workload(0.05, 20);
    const auto r = dse::guided_search(spec);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].upper_right.empty());
    CHECK(r.counts.at("fft-acc") == 0);
    CHECK(r.counts.at("viterbi-acc") == 0);
    CHECK(r.stop_reason.find("upper-right") != std::string::npos);
    const auto j = dse::to_json(r);
    CHECK(j["trace"].size() == 1);
}

TEST_CASE("guided search respects the budget and reaches a fixed point") {
    auto spec = dse::load_guided_spec(table6() / "config1.json", table6() / "candidates.json",
                                      table6() / "workload.json");
    spec.workload = small_workload(3.0, 150);
    spec.budget = 0;
    const auto capped = dse::guided_search(spec);
    REQUIRE(capped.trace.size() == 1);
    CHECK_FALSE(capped.trace[0].upper_right.empty());
    CHECK(capped.stop_reason.find("budget") != std::string::npos);

    spec.budget = 10;
    const auto r = dse::guided_search(spec);
    CHECK(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        int added = 0;
        for (const auto& [k, n] : r.trace[i].counts) added += n - r.trace[i - 1].counts.at(k);
        CHECK(added == 1);
    }

    // Restarting from the recommendation changes nothing.
    auto again = spec;
    again.base = r.recommended;
    const auto r2 = dse::guided_search(again);
    CHECK(r2.counts == r.counts);
    CHECK(r2.trace.size() == 1);
}
