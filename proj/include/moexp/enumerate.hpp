#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "moexp/graph.hpp"

namespace moexp {

struct EnumConfig {
    std::uint32_t max_nodes = 4;  // C
    std::uint32_t diameter = 2;   // D: every node within this many hops of the target
    double top_percent = 100.0;   // p

    void validate() const;  // throws on C < 1, D < 1 or p outside (0,100]
};

struct EnumeratedSubgraph {
    Subgraph subgraph;
    std::optional<std::size_t> parent;  // DFS parent: this subgraph minus its last-added edge
};

/// Every connected, acyclic, edge-induced subgraph containing the target with
/// at most C nodes, all within D hops, each emitted exactly once.
///
/// Depth-first growth from {target}: the subgraph is extended by one frontier
/// edge at a time in canonical edge order; once all extensions through an edge
/// are explored, the edge joins the forbidden set for the remaining siblings.
/// Entry 0 is always the single-node subgraph.
class Enumeration {
public:
    Enumeration() = default;
    Enumeration(NodeId target, std::vector<EnumeratedSubgraph> items);

    NodeId target() const { return target_; }
    std::size_t size() const { return items_.size(); }
    const EnumeratedSubgraph& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<EnumeratedSubgraph>& items() const { return items_; }

    /// Index of the subgraph with exactly this sorted edge set.
    std::optional<std::size_t> find(const std::vector<EdgeId>& edges) const;

    /// Proper DFS ancestors, nearest first.
    std::vector<std::size_t> ancestors(std::size_t i) const;

private:
    NodeId target_ = 0;
    std::vector<EnumeratedSubgraph> items_;
    std::unordered_map<std::vector<EdgeId>, std::size_t, SubgraphKeyHash> index_;
};

Enumeration enumerate_subgraphs(const Graph& g, NodeId target, const EnumConfig& cfg);

}  // namespace moexp
