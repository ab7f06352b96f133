#include "moexp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "moexp/error.hpp"
#include "moexp/rng.hpp"

namespace moexp {

EdgeWeights random_weights(const Graph& g, NodeId v, const EnumConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    EdgeWeights w;
    for (EdgeId e : edges_within(g, v, cfg.diameter)) w.weight[e] = rng.uniform();
    return w;
}

Subgraph grow_subgraph(const EdgeWeights& weights, const Graph& g, NodeId v, std::uint32_t max_nodes) {
    if (!g.contains(v)) throw Error("node id out of range");
    const CanonicalOrder order = canonical_order(g, v);
    std::vector<NodeId> nodes{v};
    std::vector<EdgeId> edges;
    auto in_tree = [&](NodeId x) { return std::find(nodes.begin(), nodes.end(), x) != nodes.end(); };

    while (nodes.size() < max_nodes) {
        std::optional<EdgeId> best;
        NodeId best_outside = 0;
        for (NodeId x : nodes) {
            for (const auto& nb : g.neighbors(x)) {
                auto it = weights.weight.find(nb.edge);
                if (it == weights.weight.end() || in_tree(nb.node)) continue;
                if (!best) {
                    best = nb.edge;
                    best_outside = nb.node;
                    continue;
                }
                const double wb = weights.weight.at(*best);
                if (it->second > wb || (it->second == wb && order.edge_before(nb.edge, *best))) {
                    best = nb.edge;
                    best_outside = nb.node;
                }
            }
        }
        if (!best) break;
        edges.push_back(*best);
        nodes.push_back(best_outside);
    }
    return Subgraph(g, v, std::move(edges));
}

const ShapleyEntry* ShapleyReport::find(NodeId v) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), v,
                               [](const ShapleyEntry& e, NodeId id) { return e.node < id; });
    return it != entries.end() && it->node == v ? &*it : nullptr;
}

ShapleyReport shapley_values(PairEvaluator& evaluator, const Graph& g, const Enumeration& e) {
    std::map<NodeId, std::pair<double, std::size_t>> acc;
    for (const auto& item : e.items()) {
        const Subgraph& s = item.subgraph;
        const double nu_s = evaluator.evaluate(s).nu;
        for (NodeId j : s.node_set()) {
            if (j == s.target()) continue;
            // Removing j keeps a tree containing the target iff j is a leaf.
            std::optional<EdgeId> leaf_edge;
            std::size_t degree = 0;
            for (EdgeId ed : s.edge_set()) {
                if (g.edge(ed).touches(j)) {
                    ++degree;
                    leaf_edge = ed;
                }
            }
            if (degree != 1) continue;
            std::vector<EdgeId> rest;
            for (EdgeId ed : s.edge_set()) {
                if (ed != *leaf_edge) rest.push_back(ed);
            }
            const double nu_rest = evaluator.evaluate(Subgraph(g, s.target(), std::move(rest))).nu;
            auto& [sum, count] = acc[j];
            sum += nu_s - nu_rest;
            ++count;
        }
    }
    ShapleyReport report;
    for (const auto& [node, sc] : acc) {
        report.entries.push_back({node, sc.first / static_cast<double>(sc.second), sc.second});
    }
    return report;
}

ShapleyReport shapley_values(const Model& m, const Graph& g, NodeId v, const EnumConfig& cfg, double epsilon) {
    PairEvaluator evaluator(m, g, v, {.epsilon = epsilon});
    return shapley_values(evaluator, g, enumerate_subgraphs(g, v, cfg));
}

EdgeWeights grad_weights_analytic(const Model& m, const Graph& g, NodeId v, std::uint32_t hops) {
    const ClassDistribution p = forward(m, g, v);
    const std::size_t y = p.argmax();
    const Eigen::MatrixXd& theta = m.layers().back();

    // d loss / d logit_k = P(k) - 1[k = y]; the logits are theta^T a_v and
    // the mask on (j, v) scales h_j inside a_v.
    Eigen::VectorXd coeff = -p.probs;
    coeff[static_cast<Eigen::Index>(y)] += 1.0;
    const Eigen::VectorXd direction = theta * coeff;
    double scale = 1.0;
    if (m.aggregation() == Aggregation::mean) {
        scale = 1.0 / static_cast<double>(g.degree(v) + (m.self_loop() ? 1 : 0));
    }

    EdgeWeights w;
    for (EdgeId e : edges_within(g, v, hops)) w.weight[e] = 0.0;
    for (const auto& [j, h] : penultimate_states(m, g, v)) {
        if (j == v) continue;
        auto e = g.find_edge(v, j);
        w.weight[*e] = std::abs(scale * direction.dot(h));
    }
    return w;
}

EdgeWeights grad_weights_fd(const Model& m, const Graph& g, NodeId v, double step, std::uint32_t hops) {
    if (!(step > 0.0 && step <= 0.5)) throw Error("finite-difference step must be in (0, 0.5]");
    const std::size_t y = forward(m, g, v).argmax();
    const double base = masked_loss(m, g, v, y, EdgeMask{});
    EdgeWeights w;
    for (EdgeId e : edges_within(g, v, hops)) {
        EdgeMask mask;
        mask.set(e, 1.0 - step);
        w.weight[e] = std::abs(masked_loss(m, g, v, y, mask) - base) / step;
    }
    return w;
}

std::vector<ExplanationPair> pairs_for_explanation(PairEvaluator& evaluator, const Graph& g, const Subgraph& explanation) {
    std::vector<ExplanationPair> out;
    for (const Subgraph& sub : proper_subtrees(g, explanation)) {
        if (admissible_counterfactual(explanation, sub)) out.push_back(evaluator.score(explanation, sub));
    }
    return out;
}

}  // namespace moexp
