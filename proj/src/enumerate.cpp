#include "moexp/enumerate.hpp"

#include <algorithm>

#include "moexp/error.hpp"

namespace moexp {

void EnumConfig::validate() const {
    if (max_nodes < 1) throw Error("max subgraph size C must be >= 1");
    if (diameter < 1) throw Error("search diameter D must be >= 1");
    if (!(top_percent > 0.0 && top_percent <= 100.0)) throw Error("top percent must be in (0,100]");
}

Enumeration::Enumeration(NodeId target, std::vector<EnumeratedSubgraph> items)
    : target_(target), items_(std::move(items)) {
    index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        auto key = std::vector<EdgeId>(items_[i].subgraph.edge_set().begin(), items_[i].subgraph.edge_set().end());
        index_.emplace(std::move(key), i);
    }
}

std::optional<std::size_t> Enumeration::find(const std::vector<EdgeId>& edges) const {
    auto it = index_.find(edges);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> Enumeration::ancestors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (auto p = items_[i].parent; p; p = items_[*p].parent) out.push_back(*p);
    return out;
}

namespace {

struct Frontier {
    EdgeId edge;
    NodeId outside;  // endpoint not yet in the subgraph
};

class DfsEnumerator {
public:
    DfsEnumerator(const Graph& g, NodeId target, const EnumConfig& cfg)
        : g_(g), target_(target), cfg_(cfg), order_(canonical_order(g, target)),
          dist_(hop_distances(g, target, cfg.diameter)) {}

    std::vector<EnumeratedSubgraph> run() {
        nodes_ = {target_};
        out_.push_back({Subgraph::single(target_), std::nullopt});
        extend(0, incident_candidates(target_));
        return std::move(out_);
    }

private:
    bool in_tree(NodeId v) const { return std::find(nodes_.begin(), nodes_.end(), v) != nodes_.end(); }

    // Edges from `v` to admissible nodes outside the current tree, canonical order.
    std::vector<Frontier> incident_candidates(NodeId v) const {
        std::vector<Frontier> out;
        for (const auto& nb : g_.neighbors(v)) {
            if (!dist_[nb.node] || in_tree(nb.node)) continue;
            out.push_back({nb.edge, nb.node});
        }
        std::sort(out.begin(), out.end(),
                  [&](const Frontier& a, const Frontier& b) { return order_.edge_before(a.edge, b.edge); });
        return out;
    }

    void extend(std::size_t self, const std::vector<Frontier>& candidates) {
        if (nodes_.size() >= cfg_.max_nodes) return;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const Frontier& pick = candidates[i];
            edges_.push_back(pick.edge);
            nodes_.push_back(pick.outside);

            const std::size_t index = out_.size();
            out_.push_back({Subgraph(g_, target_, edges_), self});

            // Candidates before i are forbidden from here on; those reaching the
            // newly added node would close a cycle.
            std::vector<Frontier> next;
            next.reserve(candidates.size() - i - 1 + g_.degree(pick.outside));
            for (std::size_t j = i + 1; j < candidates.size(); ++j) {
                if (candidates[j].outside != pick.outside) next.push_back(candidates[j]);
            }
            auto fresh = incident_candidates(pick.outside);
            next.insert(next.end(), fresh.begin(), fresh.end());
            extend(index, next);

            edges_.pop_back();
            nodes_.pop_back();
        }
    }

    const Graph& g_;
    NodeId target_;
    const EnumConfig& cfg_;
    CanonicalOrder order_;
    std::vector<std::optional<std::uint32_t>> dist_;
    std::vector<NodeId> nodes_;
    std::vector<EdgeId> edges_;
    std::vector<EnumeratedSubgraph> out_;
};

}  // namespace

Enumeration enumerate_subgraphs(const Graph& g, NodeId target, const EnumConfig& cfg) {
    cfg.validate();
    if (!g.contains(target)) throw Error("node id out of range");
    return Enumeration(target, DfsEnumerator(g, target, cfg).run());
}

}  // namespace moexp
