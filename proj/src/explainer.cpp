#include "moexp/explainer.hpp"

#include <cmath>

#include "moexp/error.hpp"
#include "moexp/rng.hpp"

namespace moexp {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::pareto_rank: return "pareto-rank";
        case Method::balanced: return "balanced";
        case Method::random: return "random";
        case Method::shapley: return "shapley";
        case Method::grad_fd: return "grad-fd";
        case Method::grad_analytic: return "grad-analytic";
        case Method::external_weights: return "external-weights";
    }
    return "pareto-rank";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::pareto_rank, Method::balanced, Method::random, Method::shapley, Method::grad_fd,
                     Method::grad_analytic, Method::external_weights}) {
        if (to_string(m) == name) return m;
    }
    throw Error("unknown method: " + std::string(name));
}

namespace {

void select_from_pairs(Explanation& out, bool balanced) {
    if (out.pairs.empty()) return;
    out.front = balanced ? select_balanced(out.pairs) : select_comprehensive(out.pairs);
    out.selected = out.front->selected;
    out.explanation = out.pairs[*out.selected].explanation.subgraph;
}

void explain_from_weights(Explanation& out, PairEvaluator& evaluator, const Graph& g, const ExplainConfig& cfg) {
    out.explanation = grow_subgraph(*out.weights, g, out.target, cfg.enumeration.max_nodes);
    out.pairs = pairs_for_explanation(evaluator, g, out.explanation);
    // nu is shared by all pairs, so the rank-sum pick is the largest |mu|.
    select_from_pairs(out, false);
}

void explain_by_shapley(Explanation& out, PairEvaluator& evaluator, const Graph& g, const Enumeration& e) {
    out.shapley = shapley_values(evaluator, g, e);
    const ShapleyEntry* pick = nullptr;
    for (const auto& entry : out.shapley->entries) {
        if (!pick || std::abs(entry.sv) > std::abs(pick->sv)) pick = &entry;
    }
    out.explanation = Subgraph::single(out.target);
    if (!pick) return;

    // Candidate explanations: every S containing the chosen node as a leaf,
    // paired with S minus that node.
    for (const auto& item : e.items()) {
        const Subgraph& s = item.subgraph;
        if (!s.contains_node(pick->node)) continue;
        std::vector<EdgeId> rest;
        std::size_t degree = 0;
        for (EdgeId ed : s.edge_set()) {
            if (g.edge(ed).touches(pick->node)) {
                ++degree;
            } else {
                rest.push_back(ed);
            }
        }
        if (degree != 1) continue;
        out.pairs.push_back(evaluator.score(s, Subgraph(g, out.target, std::move(rest))));
    }
    out.front = select_comprehensive(out.pairs);
    auto ties = tie_keys_of(out.pairs);
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.pairs.size(); ++i) {
        if (out.pairs[i].mu_abs > out.pairs[best].mu_abs ||
            (out.pairs[i].mu_abs == out.pairs[best].mu_abs && ties[i] < ties[best])) {
            best = i;
        }
    }
    out.front->selected = best;
    out.selected = best;
    out.explanation = out.pairs[best].explanation.subgraph;
}

}  // namespace

Explanation explain_node(const Model& m, const Graph& g, NodeId target, const ExplainConfig& cfg,
                         const Eigen::VectorXd* injected) {
    cfg.enumeration.validate();
    if (!g.contains(target)) throw Error("node " + std::to_string(target) + " not in graph");

    Explanation out;
    out.target = target;
    out.method = cfg.method;
    out.explanation = Subgraph::single(target);

    PairEvaluator evaluator(m, g, target, {.epsilon = cfg.epsilon, .memoize = true, .injected = injected});
    out.full_prediction = evaluator.full_prediction();

    switch (cfg.method) {
        case Method::pareto_rank:
        case Method::balanced: {
            const Enumeration e = enumerate_subgraphs(g, target, cfg.enumeration);
            out.enumerated = e.size();
            const auto skeletons = generate_pairs(g, e, cfg.pairing);
            out.pairs = evaluate_pairs(evaluator, e, skeletons);
            select_from_pairs(out, cfg.method == Method::balanced);
            break;
        }
        case Method::shapley: {
            const Enumeration e = enumerate_subgraphs(g, target, cfg.enumeration);
            out.enumerated = e.size();
            explain_by_shapley(out, evaluator, g, e);
            break;
        }
        case Method::random:
            out.weights = random_weights(g, target, cfg.enumeration, mix_seed(cfg.seed, target));
            explain_from_weights(out, evaluator, g, cfg);
            break;
        case Method::grad_fd:
            out.weights = grad_weights_fd(m, g, target, cfg.fd_step, cfg.enumeration.diameter);
            explain_from_weights(out, evaluator, g, cfg);
            break;
        case Method::grad_analytic:
            out.weights = grad_weights_analytic(m, g, target, cfg.enumeration.diameter);
            explain_from_weights(out, evaluator, g, cfg);
            break;
        case Method::external_weights: {
            if (!cfg.external) throw Error("external-weights method needs an edge-weights file");
            EdgeWeights local;
            for (EdgeId e : edges_within(g, target, cfg.enumeration.diameter)) {
                if (auto it = cfg.external->weight.find(e); it != cfg.external->weight.end()) local.weight[e] = it->second;
            }
            out.weights = std::move(local);
            explain_from_weights(out, evaluator, g, cfg);
            break;
        }
    }
    out.nu = evaluator.evaluate(out.explanation).nu;
    out.forward_calls = evaluator.forward_calls();
    return out;
}

}  // namespace moexp
