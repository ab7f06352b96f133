#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "../support/scenarios.hpp"
#include "moexp/baselines.hpp"
#include "moexp/error.hpp"
#include "moexp/explainer.hpp"
#include "moexp/synth.hpp"

using namespace moexp;
using scenario::plain_graph;
using scenario::vec;

namespace {

std::vector<NodeId> nodes(const Subgraph& s) { return {s.node_set().begin(), s.node_set().end()}; }

double nu_of(const Model& m, const Graph& g, NodeId v, std::vector<EdgeId> edges) {
    PairEvaluator ev(m, g, v);
    return ev.evaluate(Subgraph(g, v, std::move(edges))).nu;
}

}  // namespace

TEST_CASE("random weights") {
    moexp::Rng rng(1);
    const Graph g = scenario::random_graph(rng, 9, 0.6, 1);
    const EnumConfig cfg{.max_nodes = 4, .diameter = 2};
    REQUIRE(edges_within(g, 0, 2).size() >= 10);
    const EdgeWeights a = random_weights(g, 0, cfg, 42);
    CHECK(a == random_weights(g, 0, cfg, 42));
    CHECK(a.weight.size() == edges_within(g, 0, 2).size());
    const EdgeWeights b = random_weights(g, 0, cfg, 43);
    std::size_t same = 0;
    for (const auto& [e, w] : a.weight) same += b.weight.at(e) == w;
    CHECK(same == 0);
    for (const auto& [e, w] : a.weight) CHECK((w >= 0.0 && w < 1.0));

    const Graph iso = plain_graph(3, {{1, 2}});
    CHECK(random_weights(iso, 0, cfg, 7).weight.empty());
}

TEST_CASE("grow subgraph") {
    const Graph star = plain_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    EdgeWeights w;
    w.weight[*star.find_edge(0, 1)] = 0.9;
    w.weight[*star.find_edge(0, 2)] = 0.5;
    w.weight[*star.find_edge(0, 3)] = 0.1;
    CHECK(nodes(grow_subgraph(w, star, 0, 3)) == std::vector<NodeId>{0, 1, 2});
    CHECK(grow_subgraph(w, star, 0, 1) == Subgraph::single(0));

    // equal weights: canonical rank decides (BFS from 0, then id)
    EdgeWeights flat;
    for (EdgeId e = 0; e < star.edge_count(); ++e) flat.weight[e] = 0.5;
    CHECK(nodes(grow_subgraph(flat, star, 0, 3)) == std::vector<NodeId>{0, 1, 2});
    CHECK(nodes(grow_subgraph(flat, star, 3, 3)) == std::vector<NodeId>{0, 1, 3});

    // grows beyond the first hop and never closes a cycle
    const Graph tri = plain_graph(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}});
    EdgeWeights tw;
    for (EdgeId e = 0; e < tri.edge_count(); ++e) tw.weight[e] = 1.0;
    const Subgraph s = grow_subgraph(tw, tri, 0, 4);
    CHECK(s.size() == 4);
    CHECK(!validate_subgraph(tri, s).has_value());
}

TEST_CASE("shapley: two-node graph") {
    const Graph g = scenario::make_graph({vec({1.0, 0.0}), vec({0.0, 2.0})}, {{0, 1}});
    moexp::Rng rng(2);
    const Model m = scenario::random_model(rng, {2, 3, 2}, Activation::relu);
    const ShapleyReport r = shapley_values(m, g, 0, {});
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].node == 1);
    CHECK(r.entries[0].support_count == 1);
    CHECK(r.entries[0].sv == nu_of(m, g, 0, {0}) - nu_of(m, g, 0, {}));
}

TEST_CASE("shapley: chain b-a-i and out-of-reach nodes") {
    // i = 0, a = 1, b = 2, c = 3 three hops away
    const Graph g = scenario::make_graph({vec({0.2, 0.1}), vec({1.0, -1.0}), vec({-0.5, 2.0}), vec({3.0, 3.0})},
                                         {{2, 1}, {1, 0}, {2, 3}});
    moexp::Rng rng(3);
    const Model m = scenario::random_model(rng, {2, 3, 2}, Activation::relu, 2.0);
    const ShapleyReport r = shapley_values(m, g, 0, {.max_nodes = 3, .diameter = 2});
    const EdgeId ia = *g.find_edge(0, 1), ab = *g.find_edge(1, 2);
    REQUIRE(r.find(1));
    REQUIRE(r.find(2));
    CHECK(r.find(3) == nullptr);
    CHECK(r.find(1)->support_count == 1);
    CHECK(r.find(1)->sv == nu_of(m, g, 0, {ia}) - nu_of(m, g, 0, {}));
    CHECK(r.find(2)->sv == nu_of(m, g, 0, {ia, ab}) - nu_of(m, g, 0, {ia}));
}

TEST_CASE("shapley: brute-force oracle on small graphs") {
    moexp::Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = scenario::random_graph(rng, 2 + rng.below(5), 0.5, 2);
        const Model m = scenario::random_model(rng, {2, 3, 3}, Activation::relu, 2.0);
        const ShapleyReport r = shapley_values(m, g, 0, {.max_nodes = 4, .diameter = 2});
        const auto ref = oracle::shapley(m, g, 0, 4, 2, kDefaultSmoothing);
        REQUIRE(r.entries.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(r.entries[i].node == ref[i].node);
            CHECK(r.entries[i].support_count == ref[i].support);
            CHECK(std::abs(r.entries[i].sv - ref[i].sv) <= 1e-12 * std::max(1.0, std::abs(ref[i].sv)));
        }
    }
}

TEST_CASE("shapley: planted motif nodes rank highest") {
    const SynthResult s = synth_graph(SynthKind::planted_motif, {.nodes = 9, .classes = 3}, 7);
    const ShapleyReport r = shapley_values(s.model, s.graph, 0, {});
    auto entries = r.entries;
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.sv > b.sv; });
    std::vector<NodeId> top;
    for (std::size_t i = 0; i < 3; ++i) top.push_back(entries[i].node);
    std::sort(top.begin(), top.end());
    CHECK(top == s.motif);
}

TEST_CASE("analytic gradient: orthogonal neighbors score zero") {
    const auto before = scenario::orthogonal_star(false);
    const EdgeWeights w = grad_weights_analytic(before.model, before.graph, 0, 1);
    CHECK(w.weight.at(*before.graph.find_edge(0, 3)) == 0.0);
    CHECK(w.weight.at(*before.graph.find_edge(0, 4)) == 0.0);
    CHECK(w.weight.at(*before.graph.find_edge(0, 1)) > 0.0);

    const auto after = scenario::orthogonal_star(true);
    const EdgeWeights r = grad_weights_analytic(after.model, after.graph, 0, 1);
    CHECK(r.weight.at(*after.graph.find_edge(0, 3)) > r.weight.at(*after.graph.find_edge(0, 2)));
}

TEST_CASE("analytic gradient: certain prediction gives zero weights") {
    const Graph g = scenario::make_graph({vec({1000.0, 0.0}), vec({1.0, 2.0}), vec({0.5, -1.0})}, {{0, 1}, {0, 2}});
    const Model m({Eigen::MatrixXd::Identity(2, 2)}, Activation::identity);
    REQUIRE(forward(m, g, 0)[0] == 1.0);
    for (const auto& [e, w] : grad_weights_analytic(m, g, 0, 1).weight) CHECK(w == 0.0);
}

TEST_CASE("finite differences") {
    moexp::Rng rng(44);
    const Graph g = scenario::random_graph(rng, 8, 0.4, 2);
    const Model deep = scenario::random_model(rng, {2, 3, 3}, Activation::sigmoid);
    CHECK_THROWS_AS(grad_weights_fd(deep, g, 0, 0.0, 2), Error);
    CHECK_THROWS_AS(grad_weights_fd(deep, g, 0, 0.6, 2), Error);
    // edges beyond the model's reach are exactly zero
    const EdgeWeights w = grad_weights_fd(deep, g, 0, 1e-4, 4);
    const auto reach = edges_within(g, 0, 2);
    const auto dist = hop_distances(g, 0, 8);
    for (const auto& [e, weight] : w.weight) {
        const auto du = dist[g.edge(e).u], dv = dist[g.edge(e).v];
        if (du && dv && std::min(*du, *dv) >= 2) CHECK(weight == 0.0);
    }

    for (int trial = 0; trial < 20; ++trial) {
        const Graph h = scenario::random_graph(rng, 6, 0.5, 3);
        const Model one = scenario::random_model(rng, {3, 3}, Activation::identity);
        const EdgeWeights a = grad_weights_analytic(one, h, 0, 1);
        const EdgeWeights f = grad_weights_fd(one, h, 0, 1e-4, 1);
        for (const auto& [e, wa] : a.weight) {
            if (wa < 1e-8) continue;
            CHECK(std::abs(f.weight.at(e) - wa) / wa < 1e-3);
        }
    }
}

TEST_CASE("orthogonal star: pareto-rank is stable, gradient is not") {
    ExplainConfig cfg;
    cfg.enumeration = {.max_nodes = 3, .diameter = 1};
    for (bool rotated : {false, true}) {
        const auto s = scenario::orthogonal_star(rotated);
        CHECK(nodes(explain_node(s.model, s.graph, 0, cfg).explanation) == std::vector<NodeId>{0, 1, 2});
    }
    cfg.method = Method::grad_analytic;
    CHECK(nodes(explain_node(scenario::orthogonal_star(false).model, scenario::orthogonal_star(false).graph, 0, cfg).explanation) ==
          std::vector<NodeId>{0, 1, 2});
    const auto after = scenario::orthogonal_star(true);
    CHECK(explain_node(after.model, after.graph, 0, cfg).explanation.contains_node(3));
}

TEST_CASE("weight baselines are scored like the main method") {
    moexp::Rng rng(8);
    const Graph g = scenario::random_graph(rng, 8, 0.5, 2);
    const Model m = scenario::random_model(rng, {2, 3, 3}, Activation::relu);
    for (Method method : {Method::random, Method::grad_fd, Method::grad_analytic}) {
        ExplainConfig cfg;
        cfg.method = method;
        cfg.seed = 5;
        const Explanation ex = explain_node(m, g, 0, cfg);
        REQUIRE(ex.weights.has_value());
        CHECK(ex.explanation.size() <= 4);
        for (const auto& p : ex.pairs) {
            CHECK(p.explanation.subgraph == ex.explanation);
            CHECK(admissible_counterfactual(ex.explanation, p.counterfactual.subgraph));
        }
        if (const auto* p = ex.selected_pair()) {
            for (const auto& q : ex.pairs) CHECK(!dominates({q.explanation.nu, q.mu_abs}, {p->explanation.nu, p->mu_abs}));
        }
    }
}
