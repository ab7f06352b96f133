#include "moexp/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_set>

#include "moexp/error.hpp"

namespace moexp {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::identity: return "identity";
    }
    return "relu";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity") return Activation::identity;
    throw Error("unknown activation");
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::identity: return x;
    }
    return x;
}

Model::Model(std::vector<Eigen::MatrixXd> layers, Activation activation, bool self_loop, Aggregation aggregation)
    : layers_(std::move(layers)), activation_(activation), self_loop_(self_loop), aggregation_(aggregation) {
    if (layers_.empty()) throw Error("model needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].rows() == 0 || layers_[l].cols() == 0) throw Error("layer dimension mismatch");
        if (l > 0 && layers_[l].rows() != layers_[l - 1].cols()) throw Error("layer dimension mismatch");
    }
}

Model Model::with_last_layer(Eigen::MatrixXd theta) const {
    if (theta.rows() != layers_.back().rows() || theta.cols() != layers_.back().cols()) throw Error("shape error");
    Model copy = *this;
    copy.layers_.back() = std::move(theta);
    return copy;
}

bool operator==(const Model& a, const Model& b) {
    if (a.activation_ != b.activation_ || a.self_loop_ != b.self_loop_ || a.aggregation_ != b.aggregation_) return false;
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
        if (a.layers_[l].rows() != b.layers_[l].rows() || a.layers_[l].cols() != b.layers_[l].cols()) return false;
        if (a.layers_[l] != b.layers_[l]) return false;
    }
    return true;
}

std::size_t ClassDistribution::argmax() const {
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

ClassDistribution softmax(const Eigen::VectorXd& logits) {
    const double top = logits.maxCoeff();
    // std::exp rather than Eigen's vectorized exp, which clamps large negative
    // arguments instead of underflowing to 0.
    Eigen::VectorXd e = logits.unaryExpr([top](double z) { return std::exp(z - top); });
    return {e / e.sum()};
}

void EdgeMask::set(EdgeId e, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error("mask value outside [0,1]");
    weights_[e] = w;
}

namespace {

// The nodes a forward pass at `target` can see, in ascending id order, with
// hop distance from the target and adjacency restricted to the scope.
struct LocalView {
    std::vector<NodeId> nodes;
    std::vector<std::uint32_t> dist;
    std::vector<std::vector<std::pair<std::size_t, EdgeId>>> adj;
    std::size_t target = 0;

    std::size_t index_of(NodeId v) const {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
    }
    bool has(NodeId v) const { return std::binary_search(nodes.begin(), nodes.end(), v); }
};

LocalView make_view(const Graph& g, NodeId v, std::uint32_t hops, const Subgraph* restrict) {
    if (!g.contains(v)) throw Error("node id out of range");
    if (restrict && (restrict->target() != v || !restrict->contains_node(v))) throw Error("target not in subgraph");

    auto in_scope = [&](const Neighbor& nb) { return restrict == nullptr || restrict->contains_edge(nb.edge); };

    std::vector<std::pair<NodeId, std::uint32_t>> reached{{v, 0}};
    std::deque<std::pair<NodeId, std::uint32_t>> queue{{v, 0}};
    std::unordered_set<NodeId> seen{v};
    while (!queue.empty()) {
        auto [u, d] = queue.front();
        queue.pop_front();
        if (d == hops) continue;
        for (const auto& nb : g.neighbors(u)) {
            if (!in_scope(nb) || !seen.insert(nb.node).second) continue;
            reached.emplace_back(nb.node, d + 1);
            queue.emplace_back(nb.node, d + 1);
        }
    }
    std::sort(reached.begin(), reached.end());

    LocalView view;
    view.nodes.reserve(reached.size());
    view.dist.reserve(reached.size());
    for (auto [node, d] : reached) {
        view.nodes.push_back(node);
        view.dist.push_back(d);
    }
    view.target = view.index_of(v);
    view.adj.resize(view.nodes.size());
    for (std::size_t i = 0; i < view.nodes.size(); ++i) {
        if (view.dist[i] == hops) continue;  // its aggregation is never read
        for (const auto& nb : g.neighbors(view.nodes[i])) {
            if (in_scope(nb) && view.has(nb.node)) view.adj[i].emplace_back(view.index_of(nb.node), nb.edge);
        }
    }
    return view;
}

// Aggregation a_i at one node given the previous layer's states.
Eigen::VectorXd aggregate(const Model& m, const LocalView& view, const std::vector<Eigen::VectorXd>& h, std::size_t i,
                          const EdgeMask* mask) {
    Eigen::VectorXd a = m.self_loop() ? h[i] : Eigen::VectorXd::Zero(h[i].size());
    std::size_t count = m.self_loop() ? 1 : 0;
    for (auto [j, e] : view.adj[i]) {
        if (mask) {
            a += (*mask)(e) * h[j];
        } else {
            a += h[j];
        }
        ++count;
    }
    if (m.aggregation() == Aggregation::mean && count > 0) a /= static_cast<double>(count);
    return a;
}

// Runs layers 1..upto and returns the states (valid for nodes within
// depth - upto hops of the target).
std::vector<Eigen::VectorXd> propagate(const Model& m, const Graph& g, const LocalView& view, std::size_t upto,
                                       const ForwardScope& scope) {
    const std::size_t depth = m.depth();
    std::vector<Eigen::VectorXd> h(view.nodes.size());
    for (std::size_t i = 0; i < view.nodes.size(); ++i) h[i] = g.features(view.nodes[i]);

    for (std::size_t l = 1; l <= upto; ++l) {
        const Eigen::MatrixXd& theta = m.layer(l - 1);
        const std::size_t limit = depth - l;
        std::vector<Eigen::VectorXd> next(view.nodes.size());
        for (std::size_t i = 0; i < view.nodes.size(); ++i) {
            if (view.dist[i] > limit) continue;
            Eigen::VectorXd a = aggregate(m, view, h, i, scope.mask);
            if (l == depth && i == view.target && scope.injected) a += *scope.injected;
            Eigen::VectorXd z = theta.transpose() * a;
            if (l < depth) z = z.unaryExpr([&](double x) { return activate(m.activation(), x); });
            next[i] = std::move(z);
        }
        h = std::move(next);
    }
    return h;
}

void check_shapes(const Model& m, const Graph& g, const ForwardScope& scope) {
    if (g.feature_dim() != m.input_dim()) throw Error("shape error");
    if (scope.injected && static_cast<std::size_t>(scope.injected->size()) != static_cast<std::size_t>(m.layers().back().rows())) {
        throw Error("shape error");
    }
}

}  // namespace

Eigen::VectorXd forward_logits(const Model& m, const Graph& g, NodeId v, const ForwardScope& scope) {
    check_shapes(m, g, scope);
    auto depth = static_cast<std::uint32_t>(m.depth());
    LocalView view = make_view(g, v, depth, scope.restrict);
    auto h = propagate(m, g, view, m.depth(), scope);
    return h[view.target];
}

ClassDistribution forward(const Model& m, const Graph& g, NodeId v, const ForwardScope& scope) {
    return softmax(forward_logits(m, g, v, scope));
}

std::vector<std::pair<NodeId, Eigen::VectorXd>> penultimate_states(const Model& m, const Graph& g, NodeId v) {
    check_shapes(m, g, {});
    LocalView view = make_view(g, v, static_cast<std::uint32_t>(m.depth()), nullptr);
    auto h = propagate(m, g, view, m.depth() - 1, {});
    std::vector<std::pair<NodeId, Eigen::VectorXd>> out;
    out.emplace_back(v, h[view.target]);
    for (auto [j, e] : view.adj[view.target]) out.emplace_back(view.nodes[j], h[j]);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

Eigen::VectorXd last_layer_input(const Model& m, const Graph& g, NodeId v) {
    check_shapes(m, g, {});
    LocalView view = make_view(g, v, static_cast<std::uint32_t>(m.depth()), nullptr);
    auto h = propagate(m, g, view, m.depth() - 1, {});
    return aggregate(m, view, h, view.target, nullptr);
}

double masked_loss(const Model& m, const Graph& g, NodeId v, std::size_t y, const EdgeMask& mask) {
    ForwardScope scope;
    scope.mask = &mask;
    Eigen::VectorXd z = forward_logits(m, g, v, scope);
    if (y >= static_cast<std::size_t>(z.size())) throw Error("class index out of range");
    const double top = z.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < z.size(); ++k) sum += std::exp(z[k] - top);
    const double lse = top + std::log(sum);
    return lse - z[static_cast<Eigen::Index>(y)];
}

}  // namespace moexp
