#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "moexp/graph.hpp"

namespace moexp {

enum class Activation { relu, sigmoid, identity };
enum class Aggregation { sum, mean };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);  // throws "unknown activation"
double activate(Activation a, double x);

/// Layer-wise message-passing GCN, forward only.
///
/// Layer l maps a_i = sum of h_j over {i} ∪ N(i) through theta_l^T (shape
/// in_dim x out_dim). The activation follows every layer but the last; the
/// last layer's output are the logits that feed the softmax.
class Model {
public:
    Model() = default;
    /// Throws "layer dimension mismatch" when consecutive shapes do not chain,
    /// and "model needs at least one layer" for an empty list.
    Model(std::vector<Eigen::MatrixXd> layers, Activation activation, bool self_loop = true,
          Aggregation aggregation = Aggregation::sum);

    std::size_t depth() const { return layers_.size(); }
    std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().rows()); }
    std::size_t class_count() const { return static_cast<std::size_t>(layers_.back().cols()); }
    const Eigen::MatrixXd& layer(std::size_t l) const { return layers_[l]; }
    const std::vector<Eigen::MatrixXd>& layers() const { return layers_; }
    Activation activation() const { return activation_; }
    bool self_loop() const { return self_loop_; }
    Aggregation aggregation() const { return aggregation_; }

    /// Copy with the last layer replaced (same shape required).
    Model with_last_layer(Eigen::MatrixXd theta) const;

    friend bool operator==(const Model& a, const Model& b);

private:
    std::vector<Eigen::MatrixXd> layers_;
    Activation activation_ = Activation::relu;
    bool self_loop_ = true;
    Aggregation aggregation_ = Aggregation::sum;
};

struct ClassDistribution {
    Eigen::VectorXd probs;

    std::size_t size() const { return static_cast<std::size_t>(probs.size()); }
    std::size_t argmax() const;
    double operator[](std::size_t k) const { return probs[static_cast<Eigen::Index>(k)]; }
};

ClassDistribution softmax(const Eigen::VectorXd& logits);

/// Per-edge weights in [0,1]; edges not listed default to 1.
class EdgeMask {
public:
    EdgeMask() = default;
    void set(EdgeId e, double w);  // throws when w is outside [0,1]
    double operator()(EdgeId e) const {
        auto it = weights_.find(e);
        return it == weights_.end() ? 1.0 : it->second;
    }
    bool empty() const { return weights_.empty(); }

private:
    std::map<EdgeId, double> weights_;
};

/// Optional modifiers of a forward pass; all members are non-owning.
struct ForwardScope {
    const Subgraph* restrict = nullptr;           // evaluate the subgraph as if it were the graph
    const EdgeMask* mask = nullptr;               // scales neighbor messages (self term unmasked)
    const Eigen::VectorXd* injected = nullptr;    // extra message added to the target's last-layer aggregation
};

/// Raw output h_v^(L) (pre-softmax). Throws "shape error" on a feature/weight
/// mismatch and "target not in subgraph" when restrict does not target v.
Eigen::VectorXd forward_logits(const Model& m, const Graph& g, NodeId v, const ForwardScope& scope = {});

ClassDistribution forward(const Model& m, const Graph& g, NodeId v, const ForwardScope& scope = {});

/// Representations entering the last layer, h_j^(L-1), for v and its
/// neighbors (ascending id, v included), computed on the full graph.
std::vector<std::pair<NodeId, Eigen::VectorXd>> penultimate_states(const Model& m, const Graph& g, NodeId v);

/// Aggregated last-layer input a_v^(L) on the full graph.
Eigen::VectorXd last_layer_input(const Model& m, const Graph& g, NodeId v);

/// -log P(y | A ⊙ M) at node v.
double masked_loss(const Model& m, const Graph& g, NodeId v, std::size_t y, const EdgeMask& mask);

}  // namespace moexp
