#include "moexp/commands.hpp"

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <mutex>
#include <thread>

#include "moexp/error.hpp"
#include "moexp/rng.hpp"

namespace moexp {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json input_entry(const std::filesystem::path& p) {
    return {{"path", p.string()}, {"sha256", sha256_hex(read_file(p))}};
}

void emit(const std::filesystem::path& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out, text);
    }
}

std::string join_nodes(std::span<const NodeId> nodes) {
    std::string s;
    for (NodeId v : nodes) {
        if (!s.empty()) s += ' ';
        s += std::to_string(v);
    }
    return s;
}

struct Inputs {
    Graph graph;
    Model model;
};

Inputs load_inputs(const RunConfig& cfg) {
    return {parse_graph(read_json_file(cfg.graph_path)), load_weights(read_json_file(cfg.weights_path))};
}

}  // namespace

std::vector<NodeId> TargetSelection::resolve(const Graph& g) const {
    if (!all) return nodes;
    std::vector<NodeId> out(g.node_count());
    for (NodeId v = 0; v < out.size(); ++v) out[v] = v;
    return out;
}

std::uint64_t resolve_seed(std::uint64_t flag_value) {
    const char* env = std::getenv("MOEXP_SEED");
    if (env == nullptr || *env == '\0') return flag_value;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-') throw Error("MOEXP_SEED must be an unsigned integer");
    return v;
}

Json make_manifest(const RunConfig& cfg) {
    const ExplainConfig& e = cfg.explain;
    Json config = {{"max_nodes", e.enumeration.max_nodes},
                   {"diameter", e.enumeration.diameter},
                   {"top_percent", e.enumeration.top_percent},
                   {"method", std::string(to_string(e.method))},
                   {"exhaustive_cf", e.pairing == PairingMode::exhaustive},
                   {"epsilon", e.epsilon},
                   {"fd_step", e.fd_step}};
    Json inputs = {{"graph", input_entry(cfg.graph_path)}, {"weights", input_entry(cfg.weights_path)}};
    if (!cfg.edge_weights_path.empty()) inputs["edge_weights"] = input_entry(cfg.edge_weights_path);
    return {{"tool", "moexp"},
            {"version", kVersion},
            {"rng", Rng::kName},
            {"seed", e.seed},
            {"config", std::move(config)},
            {"inputs", std::move(inputs)},
            {"generated_at", utc_timestamp()}};
}

int explain_command(const RunConfig& cfg, std::ostream& log) {
    cfg.explain.enumeration.validate();
    const Inputs in = load_inputs(cfg);
    std::optional<EdgeWeights> external;
    ExplainConfig ecfg = cfg.explain;
    if (ecfg.method == Method::external_weights) {
        if (cfg.edge_weights_path.empty()) throw Error("external-weights method needs --edge-weights");
        external = parse_edge_weights(read_json_file(cfg.edge_weights_path), in.graph);
        ecfg.external = &*external;
    }
    const Json manifest = make_manifest(cfg);
    const auto targets = cfg.targets.resolve(in.graph);
    std::filesystem::create_directories(cfg.output);

    const auto hops = static_cast<std::uint32_t>(in.model.depth());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    std::mutex log_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            const NodeId v = targets[i];
            ExplanationDocument doc;
            try {
                if (!in.graph.contains(v)) throw Error("node " + std::to_string(v) + " not in graph");
                doc = make_document(in.graph, explain_node(in.model, in.graph, v, ecfg), hops,
                                    ecfg.enumeration.top_percent);
            } catch (const std::exception& ex) {
                doc = ExplanationDocument{};
                doc.error = ex.what();
                ++failures;
                std::lock_guard lock(log_mutex);
                log << "node " << v << ": " << ex.what() << "\n";
            }
            doc.node = v;
            doc.manifest = manifest;
            write_file_atomic(cfg.output / ("node_" + std::to_string(v) + ".json"), render_document(doc));
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, targets.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    log << targets.size() - failures << " of " << targets.size() << " node(s) explained\n";
    return failures == 0 || cfg.keep_going ? 0 : 1;
}

int enumerate_command(const RunConfig& cfg, std::ostream& log) {
    cfg.explain.enumeration.validate();
    const Graph g = parse_graph(read_json_file(cfg.graph_path));
    std::string csv = "index,parent,size,nodes,edges\n";
    std::size_t rows = 0;
    for (NodeId v : cfg.targets.resolve(g)) {
        if (!g.contains(v)) throw Error("node " + std::to_string(v) + " not in graph");
        const Enumeration e = enumerate_subgraphs(g, v, cfg.explain.enumeration);
        for (std::size_t i = 0; i < e.size(); ++i) {
            const Subgraph& s = e[i].subgraph;
            std::string edges;
            for (EdgeId id : s.edge_set()) {
                if (!edges.empty()) edges += ' ';
                edges += std::to_string(g.edge(id).u) + '-' + std::to_string(g.edge(id).v);
            }
            csv += std::to_string(i) + ',' + (e[i].parent ? std::to_string(*e[i].parent) : std::string()) + ',' +
                   std::to_string(s.size()) + ',' + join_nodes(s.node_set()) + ',' + edges + '\n';
            ++rows;
        }
    }
    emit(cfg.output, csv);
    log << rows << " subgraph(s)\n";
    return 0;
}

int shapley_command(const RunConfig& cfg, std::ostream& log) {
    cfg.explain.enumeration.validate();
    const Inputs in = load_inputs(cfg);
    std::string csv = "target,node,sv,support_count\n";
    std::size_t rows = 0;
    for (NodeId v : cfg.targets.resolve(in.graph)) {
        if (!in.graph.contains(v)) throw Error("node " + std::to_string(v) + " not in graph");
        const ShapleyReport r = shapley_values(in.model, in.graph, v, cfg.explain.enumeration, cfg.explain.epsilon);
        for (const auto& e : r.entries) {
            csv += std::to_string(v) + ',' + std::to_string(e.node) + ',' + format_real(e.sv) + ',' +
                   std::to_string(e.support_count) + '\n';
            ++rows;
        }
    }
    emit(cfg.output, csv);
    log << rows << " value(s)\n";
    return 0;
}

int robustness_command(const RunConfig& cfg, const SweepConfig& sweep, std::ostream& log) {
    cfg.explain.enumeration.validate();
    const Inputs in = load_inputs(cfg);
    const auto nodes = cfg.targets.resolve(in.graph);
    for (NodeId v : nodes) {
        if (!in.graph.contains(v)) throw Error("node " + std::to_string(v) + " not in graph");
    }
    const auto records = run_sanity_sweep(in.model, in.graph, nodes, sweep, cfg.explain);
    emit(cfg.output, robustness_csv(records));
    log << records.size() << " record(s)\n";
    return 0;
}

int synth_command(SynthKind kind, const SynthParams& params, std::uint64_t seed,
                  const std::filesystem::path& graph_out, const std::filesystem::path& weights_out,
                  std::ostream& log) {
    const SynthResult r = synth_graph(kind, params, seed);
    write_file_atomic(graph_out, graph_to_json(r.graph).dump(2) + "\n");
    write_file_atomic(weights_out, model_to_json(r.model).dump(2) + "\n");
    log << to_string(kind) << ": " << r.graph.node_count() << " nodes, " << r.graph.edge_count() << " edges\n";
    return 0;
}

}  // namespace moexp
