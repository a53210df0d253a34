#include <dssim/app.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <queue>

namespace dssim::app {

namespace {

const std::vector<TaskKind> kTxChain = {"tx_interleaver", "tx_qpsk_mod", "tx_pilot_insertion",
                                        "tx_ifft", "tx_crc"};
const std::vector<TaskKind> kRxChain = {"rx_payload_extraction", "rx_fft", "rx_pilot_extraction",
                                        "rx_qpsk_demod", "rx_deinterleaver"};
const std::vector<TaskKind> kPdChain = {"pd_fft", "pd_vector_mult", "pd_ifft", "pd_amplitude",
                                        "pd_fft_shift"};

struct GraphBuilder {
    std::vector<TaskKind> kinds;
    std::vector<CommEdge> edges;

    TaskId add(TaskKind kind) {
        kinds.push_back(std::move(kind));
        return static_cast<TaskId>(kinds.size() - 1);
    }
    void link(TaskId src, TaskId dst, double bytes) { edges.push_back({src, dst, bytes}); }

    /// Appends a linear chain fed by `from` and returns its last node.
    TaskId chain(TaskId from, const std::vector<TaskKind>& chain_kinds, double bytes) {
        TaskId prev = from;
        for (const auto& k : chain_kinds) {
            TaskId id = add(k);
            link(prev, id, bytes);
            prev = id;
        }
        return prev;
    }
};

void require_positive(int value, const char* what) {
    if (value <= 0) {
        throw ConfigError(std::string("benchmark parameter '") + what + "' must be positive, got " +
                          std::to_string(value));
    }
}

AppTemplate build_wifi_tx(const BenchmarkParams& p) {
    require_positive(p.wifi_chains, "wifi_chains");
    GraphBuilder g;
    TaskId head = g.add("tx_scrambler_encoder");
    for (int c = 0; c < p.wifi_chains; ++c) g.chain(head, kTxChain, p.wifi_edge_bytes);
    return {"wifi-tx", std::move(g.kinds), std::move(g.edges)};
}

AppTemplate build_wifi_rx(const BenchmarkParams& p) {
    require_positive(p.wifi_chains, "wifi_chains");
    GraphBuilder g;
    TaskId head = g.add("rx_match_filter");
    std::vector<TaskId> tails;
    for (int c = 0; c < p.wifi_chains; ++c) tails.push_back(g.chain(head, kRxChain, p.wifi_edge_bytes));
    TaskId decoder = g.add("rx_decoder");
    for (TaskId t : tails) g.link(t, decoder, p.wifi_edge_bytes);
    TaskId descrambler = g.add("rx_descrambler");
    g.link(decoder, descrambler, p.wifi_edge_bytes);
    return {"wifi-rx", std::move(g.kinds), std::move(g.edges)};
}

// Reference and echo waveforms are generated independently, transformed,
// correlated in the frequency domain, and peak-detected.
AppTemplate build_range_detection(const BenchmarkParams& p) {
    GraphBuilder g;
    const double b = p.radar_edge_bytes;
    TaskId lfm_ref = g.add("rd_lfm_gen");
    TaskId lfm_echo = g.add("rd_lfm_gen");
    TaskId fft_ref = g.add("rd_fft");
    TaskId fft_echo = g.add("rd_fft");
    g.link(lfm_ref, fft_ref, b);
    g.link(lfm_echo, fft_echo, b);
    TaskId mult = g.add("rd_vector_mult");
    g.link(fft_ref, mult, b);
    g.link(fft_echo, mult, b);
    TaskId ifft = g.add("rd_ifft");
    g.link(mult, ifft, b);
    TaskId detect = g.add("rd_detection");
    g.link(ifft, detect, b);
    return {"range-detection", std::move(g.kinds), std::move(g.edges)};
}

AppTemplate build_pulse_doppler(const BenchmarkParams& p) {
    require_positive(p.pd_signals, "pd_signals");
    require_positive(p.pd_samples, "pd_samples");
    GraphBuilder g;
    std::vector<TaskId> tails;
    for (int s = 0; s < p.pd_signals; ++s) {
        for (int n = 0; n < p.pd_samples; ++n) {
            TaskId head = g.add(kPdChain.front());
            std::vector<TaskKind> rest(kPdChain.begin() + 1, kPdChain.end());
            tails.push_back(g.chain(head, rest, p.pd_edge_bytes));
        }
    }
    TaskId join = g.add("pd_fft_shift");
    for (TaskId t : tails) g.link(t, join, p.pd_edge_bytes);
    return {"pulse-doppler", std::move(g.kinds), std::move(g.edges)};
}

AppTemplate build_linear(std::string name, const std::vector<TaskKind>& kinds, double bytes) {
    GraphBuilder g;
    TaskId head = g.add(kinds.front());
    g.chain(head, std::vector<TaskKind>(kinds.begin() + 1, kinds.end()), bytes);
    return {std::move(name), std::move(g.kinds), std::move(g.edges)};
}

} // namespace

std::vector<TaskId> topological_order(std::size_t node_count, const std::vector<CommEdge>& edges) {
    std::vector<std::size_t> indegree(node_count, 0);
    std::vector<std::vector<TaskId>> succ(node_count);
    for (const auto& e : edges) {
        if (e.src >= node_count || e.dst >= node_count) {
            throw ConfigError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                              " references a missing task");
        }
        succ[e.src].push_back(e.dst);
        ++indegree[e.dst];
    }
    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (std::size_t i = 0; i < node_count; ++i) {
        if (indegree[i] == 0) ready.push(static_cast<TaskId>(i));
    }
    std::vector<TaskId> order;
    order.reserve(node_count);
    while (!ready.empty()) {
        TaskId id = ready.top();
        ready.pop();
        order.push_back(id);
        for (TaskId s : succ[id]) {
            if (--indegree[s] == 0) ready.push(s);
        }
    }
    if (order.size() != node_count) {
        for (std::size_t i = 0; i < node_count; ++i) {
            if (indegree[i] > 0) {
                throw ConfigError("task graph has a cycle through task " + std::to_string(i));
            }
        }
    }
    return order;
}

AppTemplate::AppTemplate(std::string name, std::vector<TaskKind> kinds, std::vector<CommEdge> edges)
    : name_(std::move(name)), edges_(std::move(edges)) {
    if (kinds.empty()) throw ConfigError("application '" + name_ + "' has no tasks");
    nodes_.resize(kinds.size());
    in_bytes_.assign(kinds.size(), 0.0);
    out_bytes_.assign(kinds.size(), 0.0);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i].empty()) throw ConfigError("task " + std::to_string(i) + " has an empty kind");
        nodes_[i].id = static_cast<TaskId>(i);
        nodes_[i].kind = std::move(kinds[i]);
    }
    topo_ = app::topological_order(nodes_.size(), edges_);
    for (const auto& e : edges_) {
        if (!(e.volume_bytes >= 0.0)) {
            throw ConfigError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                              " has negative volume");
        }
        if (!volume_.emplace(std::pair{e.src, e.dst}, e.volume_bytes).second) {
            throw ConfigError("duplicate edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
        }
        nodes_[e.src].successors.push_back(e.dst);
        nodes_[e.dst].predecessors.push_back(e.src);
        out_bytes_[e.src] += e.volume_bytes;
        in_bytes_[e.dst] += e.volume_bytes;
    }
    for (auto& n : nodes_) {
        std::sort(n.predecessors.begin(), n.predecessors.end());
        std::sort(n.successors.begin(), n.successors.end());
    }
}

double AppTemplate::edge_volume(TaskId src, TaskId dst) const {
    auto it = volume_.find({src, dst});
    if (it == volume_.end()) {
        throw std::out_of_range("no edge " + std::to_string(src) + "->" + std::to_string(dst));
    }
    return it->second;
}

std::vector<TaskId> AppTemplate::entry_nodes() const {
    std::vector<TaskId> out;
    for (const auto& n : nodes_) {
        if (n.predecessors.empty()) out.push_back(n.id);
    }
    return out;
}

std::vector<TaskId> AppTemplate::exit_nodes() const {
    std::vector<TaskId> out;
    for (const auto& n : nodes_) {
        if (n.successors.empty()) out.push_back(n.id);
    }
    return out;
}

nlohmann::json AppTemplate::to_json() const {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& n : nodes_) tasks.push_back({{"id", n.id}, {"kind", n.kind}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : edges_) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"volume_bytes", e.volume_bytes}});
    }
    return {{"name", name_}, {"tasks", tasks}, {"edges", edges}};
}

AppTemplate AppTemplate::from_json(const nlohmann::json& j) {
    try {
        for (const auto& [key, _] : j.items()) {
            if (key != "name" && key != "tasks" && key != "edges") {
                throw ConfigError("unknown application key '" + key + "'");
            }
        }
        const auto& tasks = j.at("tasks");
        std::vector<TaskKind> kinds(tasks.size());
        std::vector<bool> seen(tasks.size(), false);
        for (const auto& t : tasks) {
            auto id = t.at("id").get<std::size_t>();
            if (id >= kinds.size() || seen[id]) {
                throw ConfigError("task ids must be unique and dense in [0, " +
                                  std::to_string(kinds.size()) + ")");
            }
            seen[id] = true;
            kinds[id] = t.at("kind").get<std::string>();
        }
        std::vector<CommEdge> edges;
        for (const auto& e : j.value("edges", nlohmann::json::array())) {
            edges.push_back({e.at("src").get<TaskId>(), e.at("dst").get<TaskId>(),
                             e.value("volume_bytes", 0.0)});
        }
        return {j.at("name").get<std::string>(), std::move(kinds), std::move(edges)};
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed application JSON: ") + ex.what());
    }
}

bool operator==(const AppTemplate& a, const AppTemplate& b) {
    if (a.name_ != b.name_ || a.nodes_.size() != b.nodes_.size() || a.volume_ != b.volume_) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
        if (a.nodes_[i].kind != b.nodes_[i].kind) return false;
    }
    return true;
}

AppTemplate build_benchmark(std::string_view name, const BenchmarkParams& params) {
    if (name == "wifi-tx") return build_wifi_tx(params);
    if (name == "wifi-rx") return build_wifi_rx(params);
    if (name == "range-detection") return build_range_detection(params);
    if (name == "pulse-doppler") return build_pulse_doppler(params);
    if (name == "sc-tx") {
        return build_linear("sc-tx", {"sc_tx_encoder", "sc_tx_modulation", "sc_tx_pulse_shaping", "sc_tx_crc"},
                            params.sc_edge_bytes);
    }
    if (name == "sc-rx") {
        return build_linear("sc-rx",
                            {"sc_rx_match_filter", "sc_rx_demodulation", "sc_rx_decoder", "sc_rx_descrambler"},
                            params.sc_edge_bytes);
    }
    if (name == "canonical") return build_canonical_graph().graph;
    throw ConfigError("unknown application '" + std::string(name) + "'");
}

const std::set<TaskKind>& known_task_kinds() {
    static const std::set<TaskKind> kinds = [] {
        std::set<TaskKind> s = {"tx_scrambler_encoder", "rx_match_filter", "rx_decoder", "rx_descrambler",
                                "rd_lfm_gen", "rd_fft", "rd_vector_mult", "rd_ifft", "rd_detection",
                                "sc_tx_encoder", "sc_tx_modulation", "sc_tx_pulse_shaping", "sc_tx_crc",
                                "sc_rx_match_filter", "sc_rx_demodulation", "sc_rx_decoder",
                                "sc_rx_descrambler"};
        for (const auto* chain : {&kTxChain, &kRxChain, &kPdChain}) s.insert(chain->begin(), chain->end());
        for (int i = 0; i < 10; ++i) s.insert("canonical_t" + std::to_string(i));
        return s;
    }();
    return kinds;
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("DSSIM_DATA_DIR"); env != nullptr && *env != '\0') return env;
#ifdef DSSIM_DEFAULT_DATA_DIR
    return DSSIM_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

CanonicalGraph build_canonical_graph() { return build_canonical_graph(data_dir() / "canonical_edges.json"); }

CanonicalGraph build_canonical_graph(const std::filesystem::path& edges_file) {
    CanonicalGraph out;
    out.costs = {{{14, 16, 9},
                  {13, 19, 18},
                  {11, 13, 19},
                  {13, 8, 17},
                  {12, 13, 10},
                  {13, 16, 9},
                  {7, 15, 11},
                  {5, 11, 14},
                  {18, 12, 29},
                  {21, 7, 16}}};
    std::ifstream in(edges_file);
    if (!in) throw ConfigError("cannot open canonical edge file " + edges_file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("malformed " + edges_file.string() + ": " + ex.what());
    }
    std::vector<CommEdge> edges;
    try {
        for (const auto& e : j.at("edges")) {
            edges.push_back({e.at("src").get<TaskId>(), e.at("dst").get<TaskId>(), e.at("cost").get<double>()});
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("malformed " + edges_file.string() + ": " + ex.what());
    }
    std::vector<TaskKind> kinds;
    for (int i = 0; i < 10; ++i) kinds.push_back("canonical_t" + std::to_string(i));
    out.graph = AppTemplate("canonical", std::move(kinds), std::move(edges));
    return out;
}

} // namespace dssim::app
