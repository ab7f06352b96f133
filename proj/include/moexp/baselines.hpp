#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "moexp/enumerate.hpp"
#include "moexp/gcn.hpp"
#include "moexp/pairs.hpp"

namespace moexp {

/// Importance per edge id; edges not listed are not candidates.
struct EdgeWeights {
    std::map<EdgeId, double> weight;

    friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;
};

/// i.i.d. uniform [0,1) weight for every edge within D hops of v, drawn in
/// ascending edge-id order from Rng(seed).
EdgeWeights random_weights(const Graph& g, NodeId v, const EnumConfig& cfg, std::uint64_t seed);

/// Greedy tree growth from {v}: repeatedly adds the heaviest weighted edge
/// with exactly one endpoint in the tree (ties by canonical edge rank) until
/// `max_nodes` nodes are included or no such edge remains.
Subgraph grow_subgraph(const EdgeWeights& weights, const Graph& g, NodeId v, std::uint32_t max_nodes);

struct ShapleyEntry {
    NodeId node;
    double sv;
    std::size_t support_count;
};

struct ShapleyReport {
    std::vector<ShapleyEntry> entries;  // ascending node id

    const ShapleyEntry* find(NodeId v) const;
};

/// Mean over enumerated S containing j (with S \ {j} still a tree containing
/// the target) of nu(S) - nu(S \ {j}). Removals that disconnect S are skipped
/// and not counted.
ShapleyReport shapley_values(PairEvaluator& evaluator, const Graph& g, const Enumeration& e);
ShapleyReport shapley_values(const Model& m, const Graph& g, NodeId v, const EnumConfig& cfg,
                             double epsilon = kDefaultSmoothing);

/// Exact saliency of the mask loss at the last layer for each edge (j, v)
/// incident to v:
///     | sum_k (1[k = y] - P(k)) theta_k^T h_j^(L-1) |
/// with y the unmasked prediction and theta_k column k of the last layer.
/// When only the y-logit depends on the mask this is |(1 - P(y)) theta_y^T h_j|.
/// Other edges within `hops` get weight 0. Exact for one-layer models; for
/// deeper models only the last-layer dependence is scored.
EdgeWeights grad_weights_analytic(const Model& m, const Graph& g, NodeId v, std::uint32_t hops);

/// One-sided finite difference of the mask loss:
///     |loss(mask_e = 1 - step) - loss(all ones)| / step
/// for every edge within `hops` of v. Requires step in (0, 0.5].
EdgeWeights grad_weights_fd(const Model& m, const Graph& g, NodeId v, double step, std::uint32_t hops);

/// All admissible (explanation, sub-tree) pairs for a fixed explanation.
std::vector<ExplanationPair> pairs_for_explanation(PairEvaluator& evaluator, const Graph& g, const Subgraph& explanation);

}  // namespace moexp
