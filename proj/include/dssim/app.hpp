#pragma once

#include <dssim/core.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace dssim::app {

/// Task-kind tags are plain strings such as "rx_fft" or "pd_vector_mult".
/// The application prefix keeps kinds with different profiles apart
/// (a WiFi-RX FFT and a pulse-Doppler FFT are different work items).
using TaskKind = std::string;

struct TaskNode {
    TaskId id = 0;
    TaskKind kind;
    std::vector<TaskId> predecessors;
    std::vector<TaskId> successors;
};

struct CommEdge {
    TaskId src = 0;
    TaskId dst = 0;
    double volume_bytes = 0.0;
};

/// A validated application DAG. Node ids are dense: nodes[i].id == i.
class AppTemplate {
public:
    AppTemplate() = default;

    /// Builds and validates the graph: dense ids, known edge endpoints,
    /// non-negative volumes, no duplicate edges, acyclic.
    AppTemplate(std::string name, std::vector<TaskKind> kinds, std::vector<CommEdge> edges);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const std::vector<TaskNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const TaskNode& node(TaskId id) const { return nodes_.at(id); }
    [[nodiscard]] const std::vector<CommEdge>& edges() const noexcept { return edges_; }

    /// Volume on edge src->dst. Throws std::out_of_range if the edge is absent.
    [[nodiscard]] double edge_volume(TaskId src, TaskId dst) const;

    /// Sum of incoming / outgoing edge volumes of a task.
    [[nodiscard]] double input_bytes(TaskId id) const { return in_bytes_.at(id); }
    [[nodiscard]] double output_bytes(TaskId id) const { return out_bytes_.at(id); }

    [[nodiscard]] std::vector<TaskId> entry_nodes() const;
    [[nodiscard]] std::vector<TaskId> exit_nodes() const;

    /// Deterministic topological order (Kahn, smallest ready id first).
    [[nodiscard]] const std::vector<TaskId>& topological_order() const noexcept { return topo_; }

    [[nodiscard]] nlohmann::json to_json() const;
    static AppTemplate from_json(const nlohmann::json& j);

    friend bool operator==(const AppTemplate& a, const AppTemplate& b);

private:
    std::string name_;
    std::vector<TaskNode> nodes_;
    std::vector<CommEdge> edges_;
    std::map<std::pair<TaskId, TaskId>, double> volume_;
    std::vector<double> in_bytes_;
    std::vector<double> out_bytes_;
    std::vector<TaskId> topo_;
};

/// Topological order of an arbitrary node list. Ties broken by ascending id.
/// Throws ConfigError naming a node on a cycle.
[[nodiscard]] std::vector<TaskId> topological_order(std::size_t node_count,
                                                    const std::vector<CommEdge>& edges);

struct BenchmarkParams {
    int wifi_chains = 5;
    // 9 signals x 10 samples x 5-task chains + 1 join = 451 tasks.
    int pd_signals = 9;
    int pd_samples = 10;
    double wifi_edge_bytes = 8.0;
    double radar_edge_bytes = 256.0;
    double pd_edge_bytes = 256.0;
    double sc_edge_bytes = 128.0;
};

inline constexpr std::array<std::string_view, 6> kBenchmarkNames = {
    "wifi-tx", "wifi-rx", "range-detection", "pulse-doppler", "sc-tx", "sc-rx"};

[[nodiscard]] AppTemplate build_benchmark(std::string_view name, const BenchmarkParams& params = {});

/// Every task kind any shipped application can emit, canonical graph included.
[[nodiscard]] const std::set<TaskKind>& known_task_kinds();

/// The 10-task canonical list-scheduling graph plus its 10x3 cost table.
struct CanonicalGraph {
    AppTemplate graph;
    // costs[task][p] for processors P0, P1, P2.
    std::array<std::array<int, 3>, 10> costs{};
};

/// Edge costs are read from canonical_edges.json in the data directory.
[[nodiscard]] CanonicalGraph build_canonical_graph();
[[nodiscard]] CanonicalGraph build_canonical_graph(const std::filesystem::path& edges_file);

/// Directory holding shipped configs (overridable with DSSIM_DATA_DIR).
[[nodiscard]] std::filesystem::path data_dir();

} // namespace dssim::app
