#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moexp/analysis.hpp"

namespace moexp {

using Json = nlohmann::json;

// --- graph / weights / edge weights ----------------------------------------
//
// Graph:   {"directed": false,
//           "nodes": [{"id": 0, "features": [..], "label": 1}, ...],
//           "edges": [[0, 1], ...]}
// Weights: {"activation": "relu", "self_loop": true, "aggregation": "sum",
//           "layers": [{"rows": d0, "cols": d1, "data": [row-major]}, ...]}
// Edge weights: {"edges": [{"u": 0, "v": 1, "weight": 0.5}, ...]}
//
// Parse errors name the offending field, e.g. "nodes[2].features: missing".

Graph parse_graph(const Json& doc);
Json graph_to_json(const Graph& g);

Model load_weights(const Json& doc);  // also rejects models with fewer than two classes
Json model_to_json(const Model& m);

EdgeWeights parse_edge_weights(const Json& doc, const Graph& g);
Json edge_weights_to_json(const EdgeWeights& w, const Graph& g);

std::string read_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);  // errors are prefixed with the path

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial document.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& bytes);

// --- explanation documents --------------------------------------------------

struct SubgraphDoc {
    std::vector<NodeId> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;

    friend bool operator==(const SubgraphDoc&, const SubgraphDoc&) = default;
};

SubgraphDoc describe(const Graph& g, const Subgraph& s);

struct PairDoc {
    SubgraphDoc explanation;
    SubgraphDoc counterfactual;
    std::vector<NodeId> delta;
    double nu = 0.0;
    double nu_counterfactual = 0.0;
    double mu = 0.0;
    std::size_t r1 = 0;
    std::size_t r2 = 0;
    std::size_t rank_sum = 0;
    bool pareto = false;

    friend bool operator==(const PairDoc&, const PairDoc&) = default;
};

struct WeightDoc {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 0.0;

    friend bool operator==(const WeightDoc&, const WeightDoc&) = default;
};

struct ShapleyDoc {
    NodeId node = 0;
    double sv = 0.0;
    std::size_t support = 0;

    friend bool operator==(const ShapleyDoc&, const ShapleyDoc&) = default;
};

/// Everything written for one target node. `manifest` is opaque here.
struct ExplanationDocument {
    Json manifest;
    NodeId node = 0;
    std::optional<std::string> error;  // set instead of the fields below on failure

    std::string method;
    std::size_t predicted_class = 0;
    std::vector<double> probs;
    SubgraphDoc explanation;
    std::optional<SubgraphDoc> counterfactual;
    std::vector<NodeId> delta;
    double nu = 0.0;
    std::optional<double> mu;
    std::optional<std::size_t> rank_sum;
    std::size_t front_size = 0;
    std::size_t pair_count = 0;
    std::size_t enumerated = 0;
    std::vector<NodeId> confounders;
    std::vector<PairDoc> top_pairs;  // ascending R, capped at top_percent of all pairs
    std::vector<WeightDoc> edge_weights;
    std::vector<ShapleyDoc> shapley;

    friend bool operator==(const ExplanationDocument&, const ExplanationDocument&) = default;
};

/// `hops` is the confounder radius (the model depth).
ExplanationDocument make_document(const Graph& g, const Explanation& ex, std::uint32_t hops, double top_percent);

Json to_json(const ExplanationDocument& doc);
ExplanationDocument document_from_json(const Json& j);

/// Serialized form: pretty-printed, keys sorted, "generated_at" kept on a
/// line of its own so that it can be dropped when comparing runs.
std::string render_document(const ExplanationDocument& doc);

// --- CSV --------------------------------------------------------------------

inline constexpr const char* kRobustnessHeader = "node,kind,strength,pred_before,pred_after,jaccard,seed";

std::string format_real(double x);  // shortest round-trip decimal
std::string robustness_csv(const std::vector<PerturbRecord>& records);

}  // namespace moexp
