#include "moexp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "moexp/error.hpp"
#include "moexp/rng.hpp"

namespace moexp {

std::vector<NodeId> confounder_set(const Graph& g, NodeId v, std::uint32_t hops, std::span<const NodeId> delta) {
    std::vector<NodeId> removed(delta.begin(), delta.end());
    std::sort(removed.begin(), removed.end());
    std::vector<NodeId> out;
    for (NodeId c : l_hop_neighborhood(g, v, hops)) {
        if (!std::binary_search(removed.begin(), removed.end(), c)) out.push_back(c);
    }
    return out;
}

std::vector<NodeId> confounder_set(const Graph& g, NodeId v, std::uint32_t hops, const ExplanationPair& pair) {
    return confounder_set(g, v, hops, pair.delta_nodes);
}

Eigen::VectorXd sem_expand_check(const Model& m, const Graph& g, NodeId v, const Subgraph* restrict) {
    if (m.depth() != 2) throw Error("SEM expansion needs a two-layer model");
    if (g.feature_dim() != m.input_dim()) throw Error("shape error");
    if (restrict && restrict->target() != v) throw Error("target not in subgraph");

    auto parents = [&](NodeId i) {
        std::vector<NodeId> out;
        if (m.self_loop()) out.push_back(i);
        for (const auto& nb : g.neighbors(i)) {
            if (restrict == nullptr || restrict->contains_edge(nb.edge)) out.push_back(nb.node);
        }
        return out;
    };
    auto reduce = [&](Eigen::VectorXd sum, std::size_t count) {
        if (m.aggregation() == Aggregation::mean && count > 0) sum /= static_cast<double>(count);
        return sum;
    };
    const Eigen::MatrixXd& theta1 = m.layer(0);
    const Eigen::MatrixXd& theta2 = m.layer(1);

    Eigen::VectorXd outer = Eigen::VectorXd::Zero(theta1.cols());
    const auto first = parents(v);
    for (NodeId j : first) {
        Eigen::VectorXd inner = Eigen::VectorXd::Zero(g.feature_dim());
        const auto second = parents(j);
        for (NodeId k : second) inner += g.features(k);
        Eigen::VectorXd pre = theta1.transpose() * reduce(std::move(inner), second.size());
        outer += pre.unaryExpr([&](double x) { return activate(m.activation(), x); });
    }
    return theta2.transpose() * reduce(std::move(outer), first.size());
}

Eigen::VectorXd intervention_effect(const Model& m, const Graph& g, const Subgraph& explanation,
                                    const Subgraph& counterfactual) {
    auto out = [&](const Subgraph& s) {
        Eigen::VectorXd h = sem_expand_check(m, g, s.target(), &s);
        return h.unaryExpr([&](double x) { return activate(m.activation(), x); }).eval();
    };
    return out(explanation) - out(counterfactual);
}

double jaccard_distance(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::vector<NodeId> x(a.begin(), a.end());
    std::vector<NodeId> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());
    if (x.empty() && y.empty()) return 0.0;
    std::vector<NodeId> both;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
    const double uni = static_cast<double>(x.size() + y.size() - both.size());
    return 1.0 - static_cast<double>(both.size()) / uni;
}

MessagePerturbation make_message(const Model& m, const Graph& g, NodeId v, double target_cos, double magnitude,
                                 std::uint64_t seed) {
    if (!(target_cos >= -1.0 && target_cos <= 1.0)) throw Error("cosine must be in [-1,1]");
    if (!(magnitude >= 0.0)) throw Error("message magnitude must be >= 0");
    MessagePerturbation out;
    out.predicted_class = forward(m, g, v).argmax();
    const Eigen::VectorXd theta_y = m.layers().back().col(static_cast<Eigen::Index>(out.predicted_class));
    const double norm = theta_y.norm();
    if (norm == 0.0) throw Error("degenerate class direction");
    const Eigen::VectorXd u = theta_y / norm;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(u.size());
    const double sine = std::sqrt(std::max(0.0, 1.0 - target_cos * target_cos));
    if (sine > 0.0) {
        Rng rng(seed);
        for (int attempt = 0; attempt < 16 && w.norm() < 1e-8; ++attempt) {
            for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.normal();
            w -= w.dot(u) * u;
            w -= w.dot(u) * u;  // second pass for orthogonality to rounding
        }
        if (w.norm() < 1e-8) throw Error("no direction orthogonal to the class vector");
        w.normalize();
    }
    out.message = magnitude * (target_cos * u + sine * w);
    return out;
}

PerturbedOutcome perturb_message(const Model& m, const Graph& g, NodeId v, double target_cos, double magnitude,
                                 std::uint64_t seed, const ExplainConfig& cfg) {
    PerturbedOutcome out;
    out.perturbation = make_message(m, g, v, target_cos, magnitude, seed);
    ForwardScope scope;
    scope.injected = &out.perturbation.message;
    out.distribution = forward(m, g, v, scope);
    out.explanation = explain_node(m, g, v, cfg, &out.perturbation.message);
    return out;
}

Model perturb_weights(const Model& m, double target_dist, std::uint64_t seed) {
    if (!(target_dist >= 0.0)) throw Error("perturbation distance must be >= 0");
    if (target_dist == 0.0) return m;
    const Eigen::MatrixXd& theta = m.layers().back();
    Rng rng(seed);
    Eigen::MatrixXd u(theta.rows(), theta.cols());
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        for (Eigen::Index r = 0; r < u.rows(); ++r) u(r, c) = rng.normal();
    }
    u /= u.norm();
    return m.with_last_layer(theta + target_dist * u);
}

std::string_view to_string(PerturbKind k) { return k == PerturbKind::message ? "message" : "weights"; }

PerturbKind parse_perturb_kind(std::string_view name) {
    if (name == "message") return PerturbKind::message;
    if (name == "weights") return PerturbKind::weights;
    throw Error("unknown perturbation mode: " + std::string(name));
}

std::vector<PerturbRecord> run_sanity_sweep(const Model& m, const Graph& g, std::span<const NodeId> nodes,
                                            const SweepConfig& sweep, const ExplainConfig& cfg) {
    if (sweep.steps < 2) throw Error("sweep needs at least two steps");
    const double d_max = sweep.max_distance >= 0.0 ? sweep.max_distance : m.layers().back().norm();

    std::vector<PerturbRecord> records;
    records.reserve(nodes.size() * sweep.steps);
    for (NodeId v : nodes) {
        const Explanation before = explain_node(m, g, v, cfg);
        const std::size_t pred_before = before.full_prediction.argmax();
        const double magnitude = sweep.message_scale * last_layer_input(m, g, v).norm();

        for (std::size_t s = 0; s < sweep.steps; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(sweep.steps - 1);
            PerturbRecord r;
            r.node = v;
            r.kind = sweep.kind;
            r.seed = sweep.seed;
            r.pred_before = pred_before;
            Subgraph after;
            if (sweep.kind == PerturbKind::message) {
                const double cos = s + 1 == sweep.steps ? -1.0 : 1.0 - 2.0 * t;
                auto outcome = perturb_message(m, g, v, cos, magnitude, sweep.seed, cfg);
                r.strength = 0.0 - cos;  // avoids -0 at cos = 0
                r.pred_after = outcome.distribution.argmax();
                after = outcome.explanation.explanation;
            } else {
                const double dist = s + 1 == sweep.steps ? d_max : d_max * t;
                const Model perturbed = perturb_weights(m, dist, sweep.seed);
                auto outcome = explain_node(perturbed, g, v, cfg);
                r.strength = dist;
                r.pred_after = outcome.full_prediction.argmax();
                after = outcome.explanation;
            }
            r.jaccard = jaccard_distance(before.explanation.node_set(), after.node_set());
            records.push_back(r);
        }
    }
    return records;
}

}  // namespace moexp
