#include "moexp/synth.hpp"

#include <algorithm>

#include "moexp/error.hpp"
#include "moexp/rng.hpp"

namespace moexp {

std::string_view to_string(SynthKind k) {
    switch (k) {
        case SynthKind::chain: return "chain";
        case SynthKind::star: return "star";
        case SynthKind::planted_motif: return "planted-motif";
        case SynthKind::erdos: return "erdos";
    }
    return "chain";
}

SynthKind parse_synth_kind(std::string_view name) {
    for (SynthKind k : {SynthKind::chain, SynthKind::star, SynthKind::planted_motif, SynthKind::erdos}) {
        if (to_string(k) == name) return k;
    }
    throw Error("unknown graph kind: " + std::string(name));
}

Model prototype_model(std::size_t classes, std::size_t feature_dim) {
    const auto k = static_cast<Eigen::Index>(classes);
    Eigen::MatrixXd theta1 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(feature_dim), k);
    theta1.topLeftCorner(k, k).setIdentity();
    return Model({theta1, Eigen::MatrixXd::Identity(k, k)}, Activation::relu);
}

SynthResult synth_graph(SynthKind kind, const SynthParams& params, std::uint64_t seed) {
    const std::size_t n = params.nodes;
    const std::size_t k = params.classes;
    const std::size_t d = params.feature_dim == 0 ? k : params.feature_dim;
    if (k < 2) throw Error("synthetic graphs need at least two classes");
    if (d < k) throw Error("feature dimension must be at least the class count");
    if (n < 1) throw Error("synthetic graphs need at least one node");
    if (kind == SynthKind::planted_motif && n < 4) throw Error("planted motif needs at least four nodes");
    if (!(params.edge_prob >= 0.0 && params.edge_prob <= 1.0)) throw Error("edge probability must be in [0,1]");
    if (!(params.noise >= 0.0)) throw Error("noise must be >= 0");

    Rng rng(seed);
    std::vector<int> labels(n, 0);
    std::vector<double> strength(n, 1.0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    SynthResult out;

    switch (kind) {
        case SynthKind::chain:
            for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
            for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            break;
        case SynthKind::star:
            for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.below(k));
            for (NodeId i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case SynthKind::planted_motif:
            labels[0] = 1;
            strength[0] = 0.0;
            for (NodeId i = 1; i <= 3; ++i) labels[i] = 1;
            edges = {{0, 1}, {1, 2}, {1, 3}};
            out.motif = {1, 2, 3};
            for (NodeId i = 4; i < n; ++i) {
                labels[i] = 0;
                strength[i] = 0.2;
                // Distractors alternate between hanging off the target and
                // extending the previous distractor.
                const bool off_target = i == 4 || (i - 4) % 2 == 0;
                edges.emplace_back(off_target ? 0 : i - 1, i);
            }
            break;
        case SynthKind::erdos: {
            for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.below(k));
            std::vector<std::size_t> degree(n, 0);
            for (NodeId u = 0; u < n; ++u) {
                for (NodeId v = u + 1; v < n; ++v) {
                    const bool draw = rng.uniform() < params.edge_prob;
                    if (!draw) continue;
                    if (params.max_degree > 0 && (degree[u] >= params.max_degree || degree[v] >= params.max_degree)) {
                        continue;
                    }
                    edges.emplace_back(u, v);
                    ++degree[u];
                    ++degree[v];
                }
            }
            break;
        }
    }

    std::vector<NodeSpec> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(d));
        for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = params.noise * rng.normal();
        x[labels[i]] += strength[i];
        nodes[i].features = std::move(x);
        nodes[i].label = labels[i];
    }
    out.graph = Graph::build(std::move(nodes), edges);
    out.model = prototype_model(k, d);
    return out;
}

}  // namespace moexp
