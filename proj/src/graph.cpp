#include "moexp/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "moexp/error.hpp"

namespace moexp {

Graph Graph::build(std::vector<NodeSpec> nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
    Graph g;
    const std::size_t n = nodes.size();
    g.dim_ = n == 0 ? 0 : static_cast<std::size_t>(nodes.front().features.size());
    g.features_.reserve(n);
    g.labels_.reserve(n);
    for (auto& spec : nodes) {
        if (static_cast<std::size_t>(spec.features.size()) != g.dim_) throw Error("feature length mismatch");
        g.features_.push_back(std::move(spec.features));
        g.labels_.push_back(spec.label);
    }

    g.edges_.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a >= n || b >= n) throw Error("node id out of range");
        if (a == b) throw Error("self-loop");
        g.edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
    }
    std::sort(g.edges_.begin(), g.edges_.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
    if (std::adjacent_find(g.edges_.begin(), g.edges_.end()) != g.edges_.end()) throw Error("duplicate edge");

    g.adjacency_.assign(n, {});
    for (EdgeId e = 0; e < g.edges_.size(); ++e) {
        const Edge& ed = g.edges_[e];
        g.adjacency_[ed.u].push_back({ed.v, e});
        g.adjacency_[ed.v].push_back({ed.u, e});
    }
    for (auto& list : g.adjacency_) {
        std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    }
    return g;
}

std::optional<EdgeId> Graph::find_edge(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return std::nullopt;
    const auto& list = adjacency_[a];
    auto it = std::lower_bound(list.begin(), list.end(), b, [](const Neighbor& x, NodeId id) { return x.node < id; });
    if (it != list.end() && it->node == b) return it->edge;
    return std::nullopt;
}

bool operator==(const Graph& a, const Graph& b) {
    if (a.dim_ != b.dim_ || a.edges_ != b.edges_ || a.labels_ != b.labels_) return false;
    if (a.features_.size() != b.features_.size()) return false;
    for (std::size_t i = 0; i < a.features_.size(); ++i) {
        if (a.features_[i] != b.features_[i]) return false;
    }
    return true;
}

Subgraph::Subgraph(const Graph& g, NodeId target, std::vector<EdgeId> edges)
    : target_(target), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    nodes_.reserve(edges_.size() + 1);
    nodes_.push_back(target);
    for (EdgeId e : edges_) {
        if (e >= g.edge_count()) throw Error("edge id out of range");
        nodes_.push_back(g.edge(e).u);
        nodes_.push_back(g.edge(e).v);
    }
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

bool Subgraph::contains_node(NodeId v) const { return std::binary_search(nodes_.begin(), nodes_.end(), v); }

bool Subgraph::contains_edge(EdgeId e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

bool operator<(const Subgraph& a, const Subgraph& b) {
    if (a.nodes_.size() != b.nodes_.size()) return a.nodes_.size() < b.nodes_.size();
    if (a.edges_ != b.edges_) return a.edges_ < b.edges_;
    return a.target_ < b.target_;
}

std::size_t SubgraphKeyHash::operator()(std::span<const EdgeId> edges) const noexcept {
    // FNV-1a over the edge ids
    std::uint64_t h = 1469598103934665603ULL;
    for (EdgeId e : edges) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= (e >> shift) & 0xFFu;
            h *= 1099511628211ULL;
        }
    }
    return static_cast<std::size_t>(h);
}

CanonicalOrder canonical_order(const Graph& g, NodeId target) {
    const std::size_t n = g.node_count();
    if (!g.contains(target)) throw Error("node id out of range");
    constexpr auto unset = static_cast<std::uint32_t>(-1);

    CanonicalOrder order;
    order.node_rank.assign(n, unset);
    order.by_rank.reserve(n);

    // Level-synchronous BFS; each level is emitted in ascending id order.
    std::vector<NodeId> level{target};
    order.node_rank[target] = 0;
    while (!level.empty()) {
        std::sort(level.begin(), level.end());
        for (NodeId v : level) order.by_rank.push_back(v);
        std::vector<NodeId> next;
        for (NodeId v : level) {
            for (const auto& nb : g.neighbors(v)) {
                if (order.node_rank[nb.node] == unset) {
                    order.node_rank[nb.node] = 0;  // reserved; real rank assigned below
                    next.push_back(nb.node);
                }
            }
        }
        level = std::move(next);
    }
    std::vector<bool> reached(n, false);
    for (NodeId v : order.by_rank) reached[v] = true;
    for (NodeId v = 0; v < n; ++v) {
        if (!reached[v]) order.by_rank.push_back(v);
    }
    for (std::uint32_t r = 0; r < n; ++r) order.node_rank[order.by_rank[r]] = r;

    std::vector<EdgeId> edges(g.edge_count());
    std::iota(edges.begin(), edges.end(), EdgeId{0});
    auto key = [&](EdgeId e) {
        auto a = order.node_rank[g.edge(e).u];
        auto b = order.node_rank[g.edge(e).v];
        return std::pair(std::min(a, b), std::max(a, b));
    };
    std::sort(edges.begin(), edges.end(), [&](EdgeId a, EdgeId b) { return key(a) < key(b); });
    order.edge_rank.assign(g.edge_count(), 0);
    for (std::uint32_t r = 0; r < edges.size(); ++r) order.edge_rank[edges[r]] = r;
    return order;
}

std::vector<std::optional<std::uint32_t>> hop_distances(const Graph& g, NodeId source, std::uint32_t max_hops) {
    std::vector<std::optional<std::uint32_t>> dist(g.node_count());
    if (!g.contains(source)) throw Error("node id out of range");
    std::deque<NodeId> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        if (*dist[v] == max_hops) continue;
        for (const auto& nb : g.neighbors(v)) {
            if (!dist[nb.node]) {
                dist[nb.node] = *dist[v] + 1;
                queue.push_back(nb.node);
            }
        }
    }
    return dist;
}

std::vector<NodeId> l_hop_neighborhood(const Graph& g, NodeId v, std::uint32_t hops) {
    auto dist = hop_distances(g, v, hops);
    std::vector<NodeId> out;
    for (NodeId u = 0; u < dist.size(); ++u) {
        if (dist[u] && *dist[u] >= 1) out.push_back(u);
    }
    return out;
}

std::vector<EdgeId> edges_within(const Graph& g, NodeId v, std::uint32_t hops) {
    auto dist = hop_distances(g, v, hops);
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (dist[g.edge(e).u] && dist[g.edge(e).v]) out.push_back(e);
    }
    return out;
}

const char* to_string(SubgraphViolation v) {
    switch (v) {
        case SubgraphViolation::disconnected: return "disconnected";
        case SubgraphViolation::cyclic: return "cyclic";
        case SubgraphViolation::missing_target: return "missing-target";
    }
    return "unknown";
}

std::optional<SubgraphViolation> validate_subgraph(const Graph& g, NodeId target, std::span<const EdgeId> edges) {
    if (!g.contains(target)) return SubgraphViolation::missing_target;
    if (edges.empty()) return std::nullopt;

    std::vector<NodeId> nodes{target};
    bool touches_target = false;
    for (EdgeId e : edges) {
        if (e >= g.edge_count()) throw Error("edge id out of range");
        nodes.push_back(g.edge(e).u);
        nodes.push_back(g.edge(e).v);
        touches_target = touches_target || g.edge(e).touches(target);
    }
    if (!touches_target) return SubgraphViolation::missing_target;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    auto local = [&](NodeId v) {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
    };
    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = nodes.size();
    for (EdgeId e : edges) {
        auto a = find(local(g.edge(e).u));
        auto b = find(local(g.edge(e).v));
        if (a == b) return SubgraphViolation::cyclic;
        parent[a] = b;
        --components;
    }
    if (components != 1) return SubgraphViolation::disconnected;
    return std::nullopt;
}

}  // namespace moexp
