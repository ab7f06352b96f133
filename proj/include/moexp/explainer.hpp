#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "moexp/baselines.hpp"
#include "moexp/pareto.hpp"

namespace moexp {

enum class Method { pareto_rank, balanced, random, shapley, grad_fd, grad_analytic, external_weights };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct ExplainConfig {
    EnumConfig enumeration;
    Method method = Method::pareto_rank;
    PairingMode pairing = PairingMode::dfs_ancestors;
    double epsilon = kDefaultSmoothing;
    std::uint64_t seed = 0;
    double fd_step = 1e-4;
    const EdgeWeights* external = nullptr;  // required for Method::external_weights
};

/// Result of explaining one node with one method.
struct Explanation {
    NodeId target = 0;
    Method method = Method::pareto_rank;
    ClassDistribution full_prediction;
    std::size_t enumerated = 0;               // subgraphs produced by the enumerator
    std::vector<ExplanationPair> pairs;       // every scored candidate pair
    std::optional<ScoredFront> front;         // empty when no pair exists
    Subgraph explanation;                     // selected explanation ({target} when no pair exists)
    double nu = 0.0;                          // simulatability of the selected explanation
    std::optional<std::size_t> selected;      // index into pairs
    std::optional<EdgeWeights> weights;       // edge-weight baselines only
    std::optional<ShapleyReport> shapley;     // shapley baseline only
    std::size_t forward_calls = 0;

    const ExplanationPair* selected_pair() const { return selected ? &pairs[*selected] : nullptr; }
};

/// Enumerate, pair, score and select for one target node. `injected` adds a
/// message to the target's last-layer aggregation in every forward pass.
Explanation explain_node(const Model& m, const Graph& g, NodeId target, const ExplainConfig& cfg,
                         const Eigen::VectorXd* injected = nullptr);

}  // namespace moexp
