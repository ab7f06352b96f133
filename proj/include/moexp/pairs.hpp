#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "moexp/enumerate.hpp"
#include "moexp/gcn.hpp"
#include "moexp/metrics.hpp"

namespace moexp {

enum class PairingMode {
    dfs_ancestors,  // counterfactuals are the explanation's DFS ancestors
    exhaustive,     // every proper sub-tree containing the target
};

struct PairSkeleton {
    std::size_t explanation;     // index into the Enumeration
    std::size_t counterfactual;  // index into the Enumeration
};

/// Drops the extreme counterfactual {target} unless the explanation has
/// exactly two nodes (where it is the only strict sub-tree).
bool admissible_counterfactual(const Subgraph& explanation, const Subgraph& counterfactual);

/// Proper sub-trees of `s` that still contain its target, in ascending order.
std::vector<Subgraph> proper_subtrees(const Graph& g, const Subgraph& s);

std::vector<PairSkeleton> generate_pairs(const Graph& g, const Enumeration& e, PairingMode mode);

struct SubgraphCandidate {
    Subgraph subgraph;
    ClassDistribution distribution;
    double nu = 0.0;  // simulatability against the full-graph prediction
};

struct ExplanationPair {
    SubgraphCandidate explanation;
    SubgraphCandidate counterfactual;
    std::vector<NodeId> delta_nodes;  // explanation nodes missing from the counterfactual
    std::size_t delta_size = 0;
    double nu_diff = 0.0;  // explanation.nu - counterfactual.nu
    double mu = 0.0;       // nu_diff / delta_size
    double mu_abs = 0.0;
};

struct EvalOptions {
    double epsilon = kDefaultSmoothing;
    bool memoize = true;
    const Eigen::VectorXd* injected = nullptr;  // see ForwardScope::injected
};

/// Scores subgraphs and pairs for one target node. Forward passes and nu are
/// cached per canonical edge set; the cache lives as long as the evaluator.
class PairEvaluator {
public:
    PairEvaluator(const Model& m, const Graph& g, NodeId target, EvalOptions opts = {});

    NodeId target() const { return target_; }
    const ClassDistribution& full_prediction() const { return full_; }
    double epsilon() const { return opts_.epsilon; }

    SubgraphCandidate evaluate(const Subgraph& s);
    ExplanationPair score(const Subgraph& explanation, const Subgraph& counterfactual);

    std::size_t forward_calls() const { return forward_calls_; }
    std::size_t memo_hits() const { return memo_hits_; }

private:
    const Model& model_;
    const Graph& graph_;
    NodeId target_;
    EvalOptions opts_;
    ClassDistribution full_;
    std::unordered_map<std::vector<EdgeId>, SubgraphCandidate, SubgraphKeyHash> memo_;
    std::size_t forward_calls_ = 0;
    std::size_t memo_hits_ = 0;
};

std::vector<ExplanationPair> evaluate_pairs(PairEvaluator& evaluator, const Enumeration& e,
                                            std::span<const PairSkeleton> pairs);

}  // namespace moexp
