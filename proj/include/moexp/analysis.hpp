#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "moexp/explainer.hpp"

namespace moexp {

// --- causal analysis --------------------------------------------------------

/// Nodes within `hops` of v on the full graph that the pair's counterfactual
/// keeps, i.e. the L-hop neighborhood minus the removed nodes.
std::vector<NodeId> confounder_set(const Graph& g, NodeId v, std::uint32_t hops, const ExplanationPair& pair);
std::vector<NodeId> confounder_set(const Graph& g, NodeId v, std::uint32_t hops, std::span<const NodeId> delta);

/// Evaluates h_v^(2) of a two-layer model as the fully expanded nested sum
///     theta2^T sum_{j in {v} ∪ N(v)} sigma(theta1^T sum_{k in {j} ∪ N(j)} x_k)
/// over the (optionally restricted) graph, without a layer loop. The last
/// layer carries no activation, matching forward_logits. Throws unless the
/// model has exactly two layers.
Eigen::VectorXd sem_expand_check(const Model& m, const Graph& g, NodeId v, const Subgraph* restrict = nullptr);

/// Effect of removing a counterfactual's missing nodes on the target's
/// output, with the model's activation applied to the last layer as well:
///     sigma(h_v^(2) | explanation) - sigma(h_v^(2) | counterfactual)
Eigen::VectorXd intervention_effect(const Model& m, const Graph& g, const Subgraph& explanation,
                                    const Subgraph& counterfactual);

// --- robustness / sanity checks ---------------------------------------------

double jaccard_distance(std::span<const NodeId> a, std::span<const NodeId> b);

/// A synthetic last-layer message m' with cos(m', theta_y) = target_cos and
/// |m'| = magnitude; its component orthogonal to theta_y is drawn from the
/// seed. y is the unperturbed prediction at v.
struct MessagePerturbation {
    std::size_t predicted_class = 0;
    Eigen::VectorXd message;
};

MessagePerturbation make_message(const Model& m, const Graph& g, NodeId v, double target_cos, double magnitude,
                                 std::uint64_t seed);

struct PerturbedOutcome {
    MessagePerturbation perturbation;
    ClassDistribution distribution;  // at v with the message injected
    Explanation explanation;         // re-selected under the perturbation
};

PerturbedOutcome perturb_message(const Model& m, const Graph& g, NodeId v, double target_cos, double magnitude,
                                 std::uint64_t seed, const ExplainConfig& cfg);

/// theta_L + target_dist * u with u a seeded unit direction (Frobenius norm);
/// earlier layers are untouched.
Model perturb_weights(const Model& m, double target_dist, std::uint64_t seed);

enum class PerturbKind { message, weights };
std::string_view to_string(PerturbKind k);
PerturbKind parse_perturb_kind(std::string_view name);

struct PerturbRecord {
    NodeId node = 0;
    PerturbKind kind = PerturbKind::message;
    double strength = 0.0;  // -cos for messages, Euclidean distance for weights
    std::size_t pred_before = 0;
    std::size_t pred_after = 0;
    double jaccard = 0.0;
    std::uint64_t seed = 0;
};

struct SweepConfig {
    PerturbKind kind = PerturbKind::message;
    std::size_t steps = 11;
    std::uint64_t seed = 0;
    double message_scale = 1.0;  // |m'| = scale * |a_v^(L)|
    double max_distance = -1.0;  // weights grid upper end; < 0 means |theta_L|
};

/// Uniform strength grid (endpoints included): cos from 1 down to -1 for
/// messages, distance from 0 to max_distance for weights. Records are ordered
/// by (node, step).
std::vector<PerturbRecord> run_sanity_sweep(const Model& m, const Graph& g, std::span<const NodeId> nodes,
                                            const SweepConfig& sweep, const ExplainConfig& cfg);

}  // namespace moexp
