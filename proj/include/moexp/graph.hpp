#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace moexp {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    NodeId u;  // u < v
    NodeId v;

    NodeId other(NodeId x) const { return x == u ? v : u; }
    bool touches(NodeId x) const { return x == u || x == v; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
    NodeId node;
    EdgeId edge;
};

struct NodeSpec {
    Eigen::VectorXd features;
    std::optional<int> label;
};

/// Immutable undirected attributed graph.
///
/// Edge ids are canonical: edges are sorted by (min endpoint, max endpoint)
/// so any permutation of the input edge list yields the same ids. Neighbor
/// lists are sorted by node id.
class Graph {
public:
    Graph() = default;

    /// Throws moexp::Error with "duplicate edge", "node id out of range",
    /// "self-loop" or "feature length mismatch".
    static Graph build(std::vector<NodeSpec> nodes, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const { return features_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t feature_dim() const { return dim_; }

    const Eigen::VectorXd& features(NodeId v) const { return features_[v]; }
    std::optional<int> label(NodeId v) const { return labels_[v]; }
    const Edge& edge(EdgeId e) const { return edges_[e]; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_[v]; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
    bool contains(NodeId v) const { return v < node_count(); }

    std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;

    friend bool operator==(const Graph& a, const Graph& b);

private:
    std::size_t dim_ = 0;
    std::vector<Eigen::VectorXd> features_;
    std::vector<std::optional<int>> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

/// Edge-induced subgraph around a target node. Identity is the sorted edge-id
/// list; node_set is derived (endpoints plus the target).
class Subgraph {
public:
    Subgraph() = default;
    Subgraph(const Graph& g, NodeId target, std::vector<EdgeId> edges);

    static Subgraph single(NodeId target) { return Subgraph(target); }

    NodeId target() const { return target_; }
    std::span<const EdgeId> edge_set() const { return edges_; }
    std::span<const NodeId> node_set() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool contains_node(NodeId v) const;
    bool contains_edge(EdgeId e) const;

    friend bool operator==(const Subgraph& a, const Subgraph& b) {
        return a.target_ == b.target_ && a.edges_ == b.edges_;
    }
    friend bool operator<(const Subgraph& a, const Subgraph& b);

private:
    explicit Subgraph(NodeId target) : target_(target), nodes_{target} {}

    NodeId target_ = 0;
    std::vector<EdgeId> edges_;
    std::vector<NodeId> nodes_;
};

struct SubgraphKeyHash {
    std::size_t operator()(std::span<const EdgeId> edges) const noexcept;
    std::size_t operator()(const std::vector<EdgeId>& edges) const noexcept {
        return (*this)(std::span<const EdgeId>(edges));
    }
};

struct CanonicalOrder {
    std::vector<std::uint32_t> node_rank;  // indexed by node id
    std::vector<NodeId> by_rank;           // inverse permutation
    std::vector<std::uint32_t> edge_rank;  // indexed by edge id

    bool edge_before(EdgeId a, EdgeId b) const { return edge_rank[a] < edge_rank[b]; }
};

/// BFS from the target, ties among same-depth nodes by ascending id;
/// unreachable nodes are ranked last in id order. Edges are ordered by
/// (min endpoint rank, max endpoint rank).
CanonicalOrder canonical_order(const Graph& g, NodeId target);

/// Shortest-path hop distance from `source`, capped: nodes farther than
/// `max_hops` (or unreachable) get std::nullopt.
std::vector<std::optional<std::uint32_t>> hop_distances(const Graph& g, NodeId source, std::uint32_t max_hops);

/// Nodes at distance 1..hops from v, ascending id (v excluded).
std::vector<NodeId> l_hop_neighborhood(const Graph& g, NodeId v, std::uint32_t hops);

/// Edges whose endpoints are both within `hops` of v, ascending id.
std::vector<EdgeId> edges_within(const Graph& g, NodeId v, std::uint32_t hops);

enum class SubgraphViolation { disconnected, cyclic, missing_target };

const char* to_string(SubgraphViolation v);

/// std::nullopt when the edge set is a tree containing the target.
std::optional<SubgraphViolation> validate_subgraph(const Graph& g, NodeId target, std::span<const EdgeId> edges);
inline std::optional<SubgraphViolation> validate_subgraph(const Graph& g, const Subgraph& s) {
    return validate_subgraph(g, s.target(), s.edge_set());
}

}  // namespace moexp
