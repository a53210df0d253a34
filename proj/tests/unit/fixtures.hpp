#pragma once

#include <dssim/app.hpp>
#include <dssim/resource.hpp>
#include <dssim/workload.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace fixtures {

using nlohmann::json;

/// A general core with one OPP at 1 GHz / 1 V.
inline json core(int id, const std::string& name, json profile, const std::string& cluster = "c") {
    return {{"id", id},
            {"name", name},
            {"type", "general-core"},
            {"subtype", "cpu"},
            {"cluster", cluster},
            {"capacity", 1},
            {"opps", json::array({{{"voltage_v", 1.0}, {"frequency_mhz", 1000}}})},
            {"latency_profile_us", std::move(profile)},
            {"power", {{"cap_f", 1e-10}, {"activity", 1.0}, {"leak_a", 0.0}, {"leak_b", 0.01}}},
            {"area_mm2", 1.0},
            {"dvfs_policy", "performance"}};
}

/// SoC around `pes` with free communication and a flat DRAM curve.
inline json soc_json(json pes) {
    return {{"name", "test"},
            {"pes", std::move(pes)},
            {"noc", {{"bandwidth_bytes_per_us", 1.0}, {"link_capacity", 8.0}, {"load_latency_us", {{0.0, 0.0}}}}},
            {"dram", {{"window_us", 100.0}, {"bandwidth_latency_ns", {{0.0, 0.0}}}}},
            {"uncore_area_mm2", 2.0},
            {"dtpm_epoch_us", 20000.0}};
}

inline dssim::resource::SocConfig soc(json pes) { return dssim::resource::soc_from_json(soc_json(std::move(pes))); }

inline dssim::resource::SocConfig soc16() {
    return dssim::resource::load_soc_config(dssim::app::data_dir() / "soc16.json");
}

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("dssim_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] std::filesystem::path operator/(const std::string& s) const { return path / s; }
};

inline void write_json(const std::filesystem::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace fixtures
