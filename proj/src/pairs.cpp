#include "moexp/pairs.hpp"

#include <algorithm>
#include <cmath>

#include "moexp/error.hpp"

namespace moexp {

bool admissible_counterfactual(const Subgraph& explanation, const Subgraph& counterfactual) {
    if (counterfactual.size() >= explanation.size()) return false;
    return !(counterfactual.size() == 1 && explanation.size() >= 3);
}

std::vector<Subgraph> proper_subtrees(const Graph& g, const Subgraph& s) {
    const auto edges = s.edge_set();
    const std::size_t k = edges.size();
    if (k >= 20) throw Error("subgraph too large for sub-tree listing");
    std::vector<Subgraph> out;
    const std::uint32_t full = (1u << k) - 1;
    for (std::uint32_t bits = 0; bits < full; ++bits) {
        std::vector<EdgeId> subset;
        for (std::size_t b = 0; b < k; ++b) {
            if (bits & (1u << b)) subset.push_back(edges[b]);
        }
        if (validate_subgraph(g, s.target(), subset)) continue;
        out.emplace_back(g, s.target(), std::move(subset));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PairSkeleton> generate_pairs(const Graph& g, const Enumeration& e, PairingMode mode) {
    std::vector<PairSkeleton> out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const Subgraph& s = e[i].subgraph;
        if (mode == PairingMode::dfs_ancestors) {
            for (std::size_t a : e.ancestors(i)) {
                if (admissible_counterfactual(s, e[a].subgraph)) out.push_back({i, a});
            }
            continue;
        }
        for (const Subgraph& sub : proper_subtrees(g, s)) {
            if (!admissible_counterfactual(s, sub)) continue;
            auto key = std::vector<EdgeId>(sub.edge_set().begin(), sub.edge_set().end());
            auto j = e.find(key);
            if (!j) throw Error("sub-tree missing from enumeration");
            out.push_back({i, *j});
        }
    }
    return out;
}

PairEvaluator::PairEvaluator(const Model& m, const Graph& g, NodeId target, EvalOptions opts)
    : model_(m), graph_(g), target_(target), opts_(opts) {
    ForwardScope scope;
    scope.injected = opts_.injected;
    full_ = forward(model_, graph_, target_, scope);
}

SubgraphCandidate PairEvaluator::evaluate(const Subgraph& s) {
    if (s.target() != target_) throw Error("target not in subgraph");
    auto key = std::vector<EdgeId>(s.edge_set().begin(), s.edge_set().end());
    if (opts_.memoize) {
        if (auto it = memo_.find(key); it != memo_.end()) {
            ++memo_hits_;
            return it->second;
        }
    }
    ForwardScope scope;
    scope.restrict = &s;
    scope.injected = opts_.injected;
    SubgraphCandidate c{s, forward(model_, graph_, target_, scope), 0.0};
    c.nu = simulatability(full_, c.distribution, opts_.epsilon);
    ++forward_calls_;
    if (opts_.memoize) memo_.emplace(std::move(key), c);
    return c;
}

ExplanationPair PairEvaluator::score(const Subgraph& explanation, const Subgraph& counterfactual) {
    ExplanationPair p;
    p.explanation = evaluate(explanation);
    p.counterfactual = evaluate(counterfactual);
    const auto outer = explanation.node_set();
    const auto inner = counterfactual.node_set();
    const auto outer_edges = explanation.edge_set();
    const auto inner_edges = counterfactual.edge_set();
    if (!std::includes(outer_edges.begin(), outer_edges.end(), inner_edges.begin(), inner_edges.end()) ||
        inner.size() >= outer.size()) {
        throw Error("counterfactual must be a strict sub-tree of the explanation");
    }
    std::set_difference(outer.begin(), outer.end(), inner.begin(), inner.end(), std::back_inserter(p.delta_nodes));
    p.delta_size = p.delta_nodes.size();
    p.nu_diff = p.explanation.nu - p.counterfactual.nu;
    p.mu = cf_relevance(p.explanation.nu, p.counterfactual.nu, p.delta_size);
    p.mu_abs = std::abs(p.mu);
    return p;
}

std::vector<ExplanationPair> evaluate_pairs(PairEvaluator& evaluator, const Enumeration& e,
                                            std::span<const PairSkeleton> pairs) {
    std::vector<ExplanationPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(evaluator.score(e[p.explanation].subgraph, e[p.counterfactual].subgraph));
    return out;
}

}  // namespace moexp
