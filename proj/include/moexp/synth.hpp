#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "moexp/gcn.hpp"

namespace moexp {

enum class SynthKind { chain, star, planted_motif, erdos };
std::string_view to_string(SynthKind k);
SynthKind parse_synth_kind(std::string_view name);

struct SynthParams {
    std::size_t nodes = 12;
    std::size_t classes = 3;      // K
    std::size_t feature_dim = 0;  // 0 means K; must be >= K otherwise
    double edge_prob = 0.3;       // erdos only
    std::size_t max_degree = 0;   // erdos only; 0 = no cap
    double noise = 0.05;          // feature noise standard deviation
};

/// Graph plus its prototype model. Class c has prototype e_c (the c-th unit
/// feature vector); theta1 = [e_0 .. e_{K-1}] maps features onto K hidden
/// channels and theta2 = I_K, so a node surrounded by class-c features
/// predicts c. The model has two layers with relu.
///
/// chain:         path 0-1-...-(n-1), classes alternating 0,1,0,...
/// star:          centre 0 joined to leaves 1..n-1, labels drawn from the seed
/// planted_motif: target 0; motif {1,2,3} with 1 adjacent to 0 and 2,3 to 1,
///                all carrying class-1 features; the remaining nodes are
///                weak class-0 distractors hanging off 0 or off each other
/// erdos:         G(n, p), optionally degree-capped, labels drawn from the seed
struct SynthResult {
    Graph graph;
    Model model;
    std::vector<NodeId> motif;  // planted_motif only
};

SynthResult synth_graph(SynthKind kind, const SynthParams& params, std::uint64_t seed);

Model prototype_model(std::size_t classes, std::size_t feature_dim);

}  // namespace moexp
