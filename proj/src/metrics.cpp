#include <dssim/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

namespace dssim::metrics {

using nlohmann::json;

std::vector<double> MetricsLedger::latencies_us() const {
    std::vector<double> out;
    for (const auto& j : jobs) {
        if (j.completion) out.push_back(ns_to_us(*j.completion - j.arrival));
    }
    return out;
}

double utilization(const MetricsLedger& ledger, const PeStats& pe) {
    if (ledger.sim_end == 0) return 0.0;
    const double u = pe.busy_ns / (static_cast<double>(pe.capacity) * static_cast<double>(ledger.sim_end));
    return std::clamp(u, 0.0, 1.0);
}

Summary summarize(const MetricsLedger& ledger, std::optional<double> area_mm2) {
    Summary s;
    s.jobs_injected = ledger.injected;
    s.jobs_completed = ledger.completed;
    s.jobs_in_flight = ledger.in_flight();
    s.sim_time_us = ns_to_us(ledger.sim_end);
    s.energy_uj = ledger.energy_uj();
    s.max_temperature_c = ledger.max_temperature_c;
    s.dram_saturations = ledger.dram_saturations;
    s.area_mm2 = area_mm2;

    const auto lat = ledger.latencies_us();
    if (!lat.empty()) {
        double sum = 0.0;
        for (double v : lat) sum += v;
        s.avg_latency_us = sum / static_cast<double>(lat.size());
    }
    if (s.sim_time_us > 0.0) {
        s.throughput_jobs_per_ms = static_cast<double>(ledger.completed) / (s.sim_time_us / 1000.0);
        s.avg_power_w = s.energy_uj / s.sim_time_us;
    }
    if (ledger.completed > 0) {
        s.energy_per_job_uj = s.energy_uj / static_cast<double>(ledger.completed);
        if (area_mm2) s.eap = *s.energy_per_job_uj * *area_mm2;
    }
    if (s.avg_latency_us) s.edp_mj_ms = (s.energy_uj / 1000.0) * (*s.avg_latency_us / 1000.0);
    if (s.avg_power_w > 0.0) s.ppw = s.throughput_jobs_per_ms / s.avg_power_w;

    for (const auto& pe : ledger.pes) {
        s.utilization[pe.name] = utilization(ledger, pe);
        s.blocking[pe.name] = pe.blocking.ratio();
    }
    return s;
}

std::vector<ClusterPlane> cluster_plane(const MetricsLedger& ledger) {
    std::vector<ClusterPlane> out;
    std::map<std::string, std::size_t> index;
    std::vector<double> busy;
    std::vector<double> cap;
    std::vector<resource::BlockingCounters> blk;
    for (const auto& pe : ledger.pes) {
        auto [it, inserted] = index.try_emplace(pe.cluster, out.size());
        if (inserted) {
            out.push_back({pe.cluster, 0.0, 0.0, {}});
            busy.push_back(0.0);
            cap.push_back(0.0);
            blk.emplace_back();
        }
        const std::size_t i = it->second;
        busy[i] += pe.busy_ns;
        cap[i] += static_cast<double>(pe.capacity);
        blk[i].busy += pe.blocking.busy;
        blk[i].total += pe.blocking.total;
        for (const auto& [kind, ns] : pe.busy_by_kind_ns) out[i].busy_by_kind_ns[kind] += ns;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double window = cap[i] * static_cast<double>(ledger.sim_end);
        out[i].utilization = window > 0.0 ? std::clamp(busy[i] / window, 0.0, 1.0) : 0.0;
        out[i].blocking = blk[i].ratio();
    }
    return out;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

json to_json(const Summary& s) {
    return json{{"schema_version", kSchemaVersion},
                {"jobs_injected", s.jobs_injected},
                {"jobs_completed", s.jobs_completed},
                {"jobs_in_flight", s.jobs_in_flight},
                {"sim_time_us", s.sim_time_us},
                {"avg_latency_us", opt(s.avg_latency_us)},
                {"throughput_jobs_per_ms", s.throughput_jobs_per_ms},
                {"energy_uj", s.energy_uj},
                {"avg_power_w", s.avg_power_w},
                {"energy_per_job_uj", opt(s.energy_per_job_uj)},
                {"edp_mj_ms", opt(s.edp_mj_ms)},
                {"ppw_jobs_per_ms_per_w", opt(s.ppw)},
                {"eap_uj_mm2", opt(s.eap)},
                {"area_mm2", opt(s.area_mm2)},
                {"max_temperature_c", s.max_temperature_c},
                {"dram_saturations", s.dram_saturations},
                {"utilization", s.utilization},
                {"blocking", s.blocking}};
}

Summary summary_from_json(const json& j) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw ConfigError("summary: unsupported schema_version");
        }
        Summary s;
        s.jobs_injected = j.at("jobs_injected").get<std::uint64_t>();
        s.jobs_completed = j.at("jobs_completed").get<std::uint64_t>();
        s.jobs_in_flight = j.at("jobs_in_flight").get<std::uint64_t>();
        s.sim_time_us = j.at("sim_time_us").get<double>();
        s.avg_latency_us = opt_from(j, "avg_latency_us");
        s.throughput_jobs_per_ms = j.at("throughput_jobs_per_ms").get<double>();
        s.energy_uj = j.at("energy_uj").get<double>();
        s.avg_power_w = j.at("avg_power_w").get<double>();
        s.energy_per_job_uj = opt_from(j, "energy_per_job_uj");
        s.edp_mj_ms = opt_from(j, "edp_mj_ms");
        s.ppw = opt_from(j, "ppw_jobs_per_ms_per_w");
        s.eap = opt_from(j, "eap_uj_mm2");
        s.area_mm2 = opt_from(j, "area_mm2");
        s.max_temperature_c = j.at("max_temperature_c").get<double>();
        s.dram_saturations = j.at("dram_saturations").get<std::uint64_t>();
        s.utilization = j.at("utilization").get<std::map<std::string, double>>();
        s.blocking = j.at("blocking").get<std::map<std::string, double>>();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("summary: ") + e.what());
    }
}

std::vector<std::size_t> pareto_frontier(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    // Sweep by ascending x: a point survives if its y beats every earlier y.
    std::vector<std::size_t> out;
    double best_y = 0.0;
    for (std::size_t i : order) {
        const auto& p = points[i];
        if (!out.empty()) {
            const auto& last = points[out.back()];
            if (p == last) continue;
            if (p.second >= best_y) continue;
        }
        out.push_back(i);
        best_y = p.second;
    }
    return out;
}

std::vector<Bin> histogram(const std::vector<double>& values, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("histogram: bin width must be positive");
    if (values.empty()) return {};
    std::map<long long, std::uint64_t> counts;
    for (double v : values) ++counts[static_cast<long long>(std::floor(v / bin_width))];
    std::vector<Bin> out;
    const long long lo = counts.begin()->first;
    const long long hi = counts.rbegin()->first;
    for (long long k = lo; k <= hi; ++k) {
        auto it = counts.find(k);
        out.push_back({static_cast<double>(k) * bin_width, it == counts.end() ? 0 : it->second});
    }
    return out;
}

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write " + path.string());
    return out;
}

} // namespace

void write_gantt_csv(const MetricsLedger& ledger, const std::filesystem::path& path) {
    auto rows = ledger.gantt;
    std::sort(rows.begin(), rows.end(), [](const GanttRecord& a, const GanttRecord& b) {
        return std::tie(a.start, a.pe, a.slot, a.job, a.task) < std::tie(b.start, b.pe, b.slot, b.job, b.task);
    });
    auto out = open_out(path);
    out << "job,task,pe,slot,start_us,end_us,opp\n";
    for (const auto& r : rows) {
        out << r.job << ',' << r.task << ',' << r.pe << ',' << r.slot << ',' << fmt(ns_to_us(r.start)) << ','
            << fmt(ns_to_us(r.end)) << ',' << r.opp << '\n';
    }
}

void write_traces_csv(const MetricsLedger& ledger, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "time_us,pe_or_cluster,dyn_w,static_w,temp_c,opp_index\n";
    for (const auto& r : ledger.traces) {
        out << fmt(ns_to_us(r.time)) << ',' << r.pe_or_cluster << ',' << fmt(r.dyn_w, 6) << ','
            << fmt(r.static_w, 6) << ',' << fmt(r.temp_c, 3) << ',' << r.opp_index << '\n';
    }
}

void write_events_csv(const MetricsLedger& ledger, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "time_us,event,job,task,pe,opp\n";
    auto field = [](std::int64_t v) { return v < 0 ? std::string() : std::to_string(v); };
    for (const auto& e : ledger.events) {
        out << fmt(ns_to_us(e.time)) << ',' << e.event << ',' << field(e.job) << ',' << field(e.task) << ','
            << field(e.pe) << ',' << field(e.opp) << '\n';
    }
}

void write_summary_json(const Summary& summary, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << to_json(summary).dump(2) << '\n';
}

Summary read_summary_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed summary " + path.string() + ": " + e.what());
    }
    return summary_from_json(j);
}

void export_run(const MetricsLedger& ledger, const Summary& summary, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw SimulationError("cannot create " + dir.string() + ": " + ec.message());
    write_gantt_csv(ledger, dir / "gantt.csv");
    write_traces_csv(ledger, dir / "traces.csv");
    write_summary_json(summary, dir / "summary.json");
}

} // namespace dssim::metrics
