#include <doctest.h>

#include <cmath>

#include "../support/scenarios.hpp"
#include "moexp/error.hpp"
#include "moexp/gcn.hpp"
#include "moexp/io.hpp"

using namespace moexp;
using scenario::vec;

namespace {

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Json layer_json(int rows, int cols) {
    return {{"rows", rows}, {"cols", cols}, {"data", std::vector<double>(static_cast<std::size_t>(rows * cols), 0.5)}};
}

}  // namespace

TEST_CASE("forward: isolated node, identity layer") {
    const Graph g = scenario::make_graph({vec({1.0, 0.0})}, {});
    const Model m({Eigen::MatrixXd::Identity(2, 2)}, Activation::relu);
    const Eigen::VectorXd logits = forward_logits(m, g, 0);
    CHECK(logits[0] == 1.0);
    CHECK(logits[1] == 0.0);
    const ClassDistribution p = forward(m, g, 0);
    const double e = std::exp(1.0);
    CHECK(p[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(0.7311).epsilon(1e-4));
}

TEST_CASE("forward: all-ones mask equals no mask") {
    moexp::Rng rng(3);
    const Graph g = scenario::random_graph(rng, 7, 0.4, 3);
    const Model m = scenario::random_model(rng, {3, 4, 2}, Activation::relu);
    EdgeMask ones;
    for (EdgeId e = 0; e < g.edge_count(); ++e) ones.set(e, 1.0);
    ForwardScope scope;
    scope.mask = &ones;
    for (NodeId v = 0; v < g.node_count(); ++v) CHECK(forward(m, g, v, scope).probs == forward(m, g, v).probs);
}

TEST_CASE("forward: confounder chain matches the closed form") {
    const Model m = scenario::confounder_model();
    for (double t : {-3.0, 0.0, 0.7, 5.0}) {
        const Graph g = scenario::confounder_chain(t);
        // h_i = sigma(h_i + h_1 + h_3) + sigma(h_1 + h_2 + h_i) + sigma(h_3 + h_i)
        const double expected = 2.0 * sigmoid(t) + sigmoid(1.0);
        CHECK(forward_logits(m, g, scenario::kI)[0] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("forward: errors") {
    const Graph g = scenario::plain_graph(3, {{0, 1}, {1, 2}}, 2);
    const Model wrong({Eigen::MatrixXd::Ones(3, 2)}, Activation::relu);
    CHECK(error_of([&] { forward(wrong, g, 0); }) == "shape error");
    const Model m({Eigen::MatrixXd::Ones(2, 2)}, Activation::relu);
    const Subgraph s(g, 1, {*g.find_edge(0, 1)});
    ForwardScope scope;
    scope.restrict = &s;
    CHECK(error_of([&] { forward(m, g, 0, scope); }) == "target not in subgraph");
}

TEST_CASE("forward: softmax is a distribution") {
    moexp::Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = scenario::random_graph(rng, 6, 0.5, 2);
        const Model m = scenario::random_model(rng, {2, 3, 4}, Activation::sigmoid, 3.0);
        const ClassDistribution p = forward(m, g, 0);
        CHECK(std::abs(p.probs.sum() - 1.0) <= 1e-9);
        CHECK((p.probs.array() > 0.0).all());
    }
}

TEST_CASE("forward: locality") {
    // path 0-1-2-3-4; a 2-layer model at node 0 cannot see nodes 3 and 4
    moexp::Rng rng(21);
    const Model m = scenario::random_model(rng, {2, 3, 2}, Activation::relu);
    auto path = [](double far) {
        return scenario::make_graph({vec({1, 0}), vec({0, 1}), vec({1, 1}), vec({far, 2}), vec({far, -far})},
                                    {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    };
    const Graph a = path(0.0);
    const Graph b = path(7.0);
    CHECK(forward(m, a, 0).probs == forward(m, b, 0).probs);
    EdgeMask mask;
    mask.set(*a.find_edge(2, 3), 0.0);
    mask.set(*a.find_edge(3, 4), 0.3);
    ForwardScope scope;
    scope.mask = &mask;
    CHECK(forward(m, a, 0, scope).probs == forward(m, a, 0).probs);
    const std::size_t y = forward(m, a, 0).argmax();
    CHECK(masked_loss(m, a, 0, y, mask) == masked_loss(m, a, 0, y, EdgeMask{}));
}

TEST_CASE("forward: restriction equals the standalone subgraph") {
    moexp::Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = scenario::random_graph(rng, 7, 0.45, 2);
        const Model m = scenario::random_model(rng, {2, 3, 3}, Activation::relu);
        // BFS tree of node 0
        std::vector<EdgeId> tree;
        std::vector<bool> seen(g.node_count(), false);
        std::vector<NodeId> queue{0};
        seen[0] = true;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            for (const auto& nb : g.neighbors(queue[h])) {
                if (seen[nb.node]) continue;
                seen[nb.node] = true;
                queue.push_back(nb.node);
                tree.push_back(nb.edge);
            }
        }
        const Subgraph s(g, 0, tree);
        std::vector<std::pair<NodeId, NodeId>> kept;
        for (EdgeId e : s.edge_set()) kept.emplace_back(g.edge(e).u, g.edge(e).v);
        std::vector<NodeSpec> specs;
        for (NodeId v = 0; v < g.node_count(); ++v) specs.push_back({g.features(v), std::nullopt});
        const Graph standalone = Graph::build(specs, kept);
        ForwardScope scope;
        scope.restrict = &s;
        CHECK(forward(m, g, 0, scope).probs == forward(m, standalone, 0).probs);
    }
}

TEST_CASE("forward: self loop and mean aggregation") {
    const Graph g = scenario::make_graph({vec({1.0}), vec({2.0}), vec({4.0})}, {{0, 1}, {0, 2}});
    Eigen::MatrixXd t(1, 2);
    t << 1.0, 0.0;
    CHECK(forward_logits(Model({t}, Activation::relu, true), g, 0)[0] == 7.0);
    CHECK(forward_logits(Model({t}, Activation::relu, false), g, 0)[0] == 6.0);
    CHECK(forward_logits(Model({t}, Activation::relu, true, Aggregation::mean), g, 0)[0] ==
          doctest::Approx(7.0 / 3.0));
    CHECK(forward_logits(Model({t}, Activation::relu, false, Aggregation::mean), g, 0)[0] == 3.0);
}

TEST_CASE("forward: injected message lands in the last aggregation") {
    const Graph g = scenario::make_graph({vec({1.0, 0.0}), vec({0.0, 1.0})}, {{0, 1}});
    const Model m({Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)}, Activation::relu);
    const Eigen::VectorXd msg = vec({0.25, -3.0});
    ForwardScope scope;
    scope.injected = &msg;
    CHECK((forward_logits(m, g, 0, scope) - forward_logits(m, g, 0) - msg).norm() < 1e-15);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    scope.injected = &zero;
    CHECK(forward_logits(m, g, 0, scope) == forward_logits(m, g, 0));
}

TEST_CASE("masked loss") {
    moexp::Rng rng(4);
    const Graph g = scenario::random_graph(rng, 5, 0.6, 2);
    const Model m = scenario::random_model(rng, {2, 2}, Activation::identity);
    const ClassDistribution p = forward(m, g, 0);
    const std::size_t y = p.argmax();
    CHECK(masked_loss(m, g, 0, y, EdgeMask{}) == doctest::Approx(-std::log(p[y])).epsilon(1e-14));

    const Graph single = scenario::make_graph({vec({1000.0, 0.0})}, {});
    const Model certain({Eigen::MatrixXd::Identity(2, 2)}, Activation::identity);
    CHECK(masked_loss(certain, single, 0, 0, EdgeMask{}) == 0.0);
}

TEST_CASE("edge mask rejects values outside [0,1]") {
    EdgeMask mask;
    CHECK_THROWS_AS(mask.set(0, 1.5), Error);
    CHECK_THROWS_AS(mask.set(0, -0.1), Error);
    CHECK(mask(3) == 1.0);
}

TEST_CASE("load weights") {
    Json doc = {{"activation", "relu"}, {"self_loop", true}, {"layers", {layer_json(4, 3), layer_json(3, 2)}}};
    const Model m = load_weights(doc);
    CHECK(m.depth() == 2);
    CHECK(m.class_count() == 2);
    CHECK(m.input_dim() == 4);
    CHECK(load_weights(model_to_json(m)) == m);

    doc["layers"] = {layer_json(4, 3), layer_json(5, 2)};
    CHECK(error_of([&] { load_weights(doc); }) == "layer dimension mismatch");
    doc["layers"] = {layer_json(4, 3), layer_json(3, 2)};
    doc["activation"] = "tanh";
    CHECK(error_of([&] { load_weights(doc); }) == "unknown activation");
    doc["activation"] = "sigmoid";
    doc["layers"] = {layer_json(4, 1)};
    CHECK_THROWS_AS(load_weights(doc), Error);
}
