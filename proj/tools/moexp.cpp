#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moexp/commands.hpp"

namespace {

using namespace moexp;

struct Flags {
    std::string graph, weights, edge_weights, output;
    std::vector<std::string> nodes;
    std::uint32_t max_nodes = 4;
    std::uint32_t diameter = 2;
    double top_percent = 100.0;
    std::string method = "pareto-rank";
    bool exhaustive_cf = false;
    double epsilon = kDefaultSmoothing;
    double fd_step = 1e-4;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool keep_going = false;
};

void add_search_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("-C,--max-nodes", f.max_nodes, "Maximum subgraph size in nodes")->capture_default_str();
    cmd->add_option("-D,--diameter", f.diameter, "Maximum hop distance from the target")->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "Smoothing applied before the KL terms")->capture_default_str();
}

void add_node_flag(CLI::App* cmd, Flags& f) {
    cmd->add_option("-n,--nodes", f.nodes, "Target node ids, or all-test for every node")->required();
}

RunConfig to_run_config(const Flags& f) {
    RunConfig cfg;
    cfg.graph_path = f.graph;
    cfg.weights_path = f.weights;
    cfg.edge_weights_path = f.edge_weights;
    cfg.output = f.output;
    cfg.jobs = f.jobs;
    cfg.keep_going = f.keep_going;
    for (const auto& n : f.nodes) {
        if (n == "all-test" || n == "all") {
            cfg.targets.all = true;
            continue;
        }
        std::size_t used = 0;
        const unsigned long id = std::stoul(n, &used);
        if (used != n.size()) throw CLI::ValidationError("--nodes", "not a node id: " + n);
        cfg.targets.nodes.push_back(static_cast<NodeId>(id));
    }
    cfg.explain.enumeration.max_nodes = f.max_nodes;
    cfg.explain.enumeration.diameter = f.diameter;
    cfg.explain.enumeration.top_percent = f.top_percent;
    cfg.explain.method = parse_method(f.method);
    cfg.explain.pairing = f.exhaustive_cf ? PairingMode::exhaustive : PairingMode::dfs_ancestors;
    cfg.explain.epsilon = f.epsilon;
    cfg.explain.fd_step = f.fd_step;
    cfg.explain.seed = resolve_seed(f.seed);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective explanations for GCN node predictions"};
    app.require_subcommand(1);
    Flags f;

    auto* explain = app.add_subcommand("explain", "Select explanation/counterfactual pairs per target node");
    explain->add_option("-g,--graph", f.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    explain->add_option("-w,--weights", f.weights, "Weights JSON")->required()->check(CLI::ExistingFile);
    add_node_flag(explain, f);
    add_search_flags(explain, f);
    explain->add_option("-p,--top-percent", f.top_percent, "Share of pairs listed, ranked by R")->capture_default_str();
    explain->add_option("-m,--method", f.method,
                        "pareto-rank, balanced, random, shapley, grad-fd, grad-analytic, external-weights")
        ->capture_default_str();
    explain->add_flag("--exhaustive-cf", f.exhaustive_cf, "Pair with every proper sub-tree, not only DFS ancestors");
    explain->add_option("--edge-weights", f.edge_weights, "Edge weights JSON for external-weights")
        ->check(CLI::ExistingFile);
    explain->add_option("--fd-step", f.fd_step, "Finite-difference step for grad-fd")->capture_default_str();
    explain->add_option("-s,--seed", f.seed, "Seed (MOEXP_SEED overrides)")->capture_default_str();
    explain->add_option("-j,--jobs", f.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    explain->add_flag("--keep-going", f.keep_going, "Exit 0 even when some nodes fail");
    explain->add_option("-o,--output", f.output, "Output directory")->required();

    auto* enumerate = app.add_subcommand("enumerate", "List candidate subgraphs as CSV");
    enumerate->add_option("-g,--graph", f.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    add_node_flag(enumerate, f);
    add_search_flags(enumerate, f);
    enumerate->add_option("-o,--output", f.output, "CSV file, - for stdout")->capture_default_str();

    auto* shapley = app.add_subcommand("shapley", "Per-node Shapley values as CSV");
    shapley->add_option("-g,--graph", f.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    shapley->add_option("-w,--weights", f.weights, "Weights JSON")->required()->check(CLI::ExistingFile);
    add_node_flag(shapley, f);
    add_search_flags(shapley, f);
    shapley->add_option("-o,--output", f.output, "CSV file, - for stdout");

    SweepConfig sweep;
    std::string mode = "message";
    auto* robust = app.add_subcommand("robustness", "Message / weight perturbation sweep as CSV");
    robust->add_option("-g,--graph", f.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    robust->add_option("-w,--weights", f.weights, "Weights JSON")->required()->check(CLI::ExistingFile);
    add_node_flag(robust, f);
    add_search_flags(robust, f);
    robust->add_option("-m,--method", f.method, "Explanation method re-run at every step")->capture_default_str();
    robust->add_option("--mode", mode, "message or weights")->capture_default_str();
    robust->add_option("--steps", sweep.steps, "Grid points, endpoints included")->capture_default_str();
    robust->add_option("--message-scale", sweep.message_scale, "|m'| relative to the target's last-layer input")
        ->capture_default_str();
    robust->add_option("--max-distance", sweep.max_distance, "Upper end of the weights grid (default |theta_L|)");
    robust->add_option("-s,--seed", f.seed, "Seed (MOEXP_SEED overrides)")->capture_default_str();
    robust->add_option("-o,--output", f.output, "CSV file, - for stdout");

    std::string kind = "chain";
    SynthParams params;
    std::string graph_out, weights_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic graph and its prototype model");
    synth->add_option("-k,--kind", kind, "chain, star, planted-motif, erdos")->capture_default_str();
    synth->add_option("--nodes", params.nodes, "Node count")->capture_default_str();
    synth->add_option("--classes", params.classes, "Class count")->capture_default_str();
    synth->add_option("--feature-dim", params.feature_dim, "Feature dimension (0 = class count)");
    synth->add_option("--edge-prob", params.edge_prob, "Edge probability (erdos)")->capture_default_str();
    synth->add_option("--max-degree", params.max_degree, "Degree cap (erdos, 0 = none)");
    synth->add_option("--noise", params.noise, "Feature noise std")->capture_default_str();
    synth->add_option("-s,--seed", f.seed, "Seed (MOEXP_SEED overrides)")->capture_default_str();
    synth->add_option("--graph-out", graph_out, "Graph JSON path")->required();
    synth->add_option("--weights-out", weights_out, "Weights JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return synth_command(parse_synth_kind(kind), params, resolve_seed(f.seed), graph_out, weights_out,
                                 std::cerr);
        }
        const RunConfig cfg = to_run_config(f);
        if (explain->parsed()) return explain_command(cfg, std::cerr);
        if (enumerate->parsed()) return enumerate_command(cfg, std::cerr);
        if (shapley->parsed()) return shapley_command(cfg, std::cerr);
        sweep.kind = parse_perturb_kind(mode);
        sweep.seed = cfg.explain.seed;
        return robustness_command(cfg, sweep, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
