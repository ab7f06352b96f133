#include "moexp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "moexp/error.hpp"

namespace moexp {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw Error(where + ": " + what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + "." + key, "missing");
    return *it;
}

std::int64_t as_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

std::size_t as_count(const Json& j, const std::string& where) {
    const auto x = as_int(j, where);
    if (x < 0) fail(where, "expected a non-negative integer");
    return static_cast<std::size_t>(x);
}

double as_real(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

const Json& as_array(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

NodeId as_node(const Json& j, const std::string& where) {
    const auto x = as_int(j, where);
    if (x < 0 || x > std::numeric_limits<NodeId>::max()) fail(where, "node id out of range");
    return static_cast<NodeId>(x);
}

// Errors thrown by Graph::build etc. keep their exact text; only schema
// errors get field context.
template <typename F>
auto with_context(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

}  // namespace

Graph parse_graph(const Json& doc) {
    if (!doc.is_object()) fail("graph", "expected an object");
    if (auto it = doc.find("directed"); it != doc.end()) {
        if (!it->is_boolean()) fail("directed", "expected a boolean");
        if (it->get<bool>()) fail("directed", "only undirected graphs are supported");
    }
    const Json& nodes = as_array(field(doc, "nodes", "graph"), "nodes");
    std::vector<NodeSpec> specs(nodes.size());
    std::vector<bool> seen(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string where = at("nodes", i);
        const Json& n = nodes[i];
        const NodeId id = as_node(field(n, "id", where), where + ".id");
        if (id >= nodes.size()) fail(where + ".id", "ids must be dense in 0..n-1");
        if (seen[id]) fail(where + ".id", "duplicate node id");
        seen[id] = true;
        const Json& f = as_array(field(n, "features", where), where + ".features");
        Eigen::VectorXd x(static_cast<Eigen::Index>(f.size()));
        for (std::size_t k = 0; k < f.size(); ++k) {
            x[static_cast<Eigen::Index>(k)] = as_real(f[k], at(where + ".features", k));
        }
        specs[id].features = std::move(x);
        if (auto it = n.find("label"); it != n.end() && !it->is_null()) {
            specs[id].label = static_cast<int>(as_int(*it, where + ".label"));
        }
    }
    const Json& edges = as_array(field(doc, "edges", "graph"), "edges");
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = at("edges", i);
        const Json& e = as_array(edges[i], where);
        if (e.size() != 2) fail(where, "expected [u, v]");
        pairs.emplace_back(as_node(e[0], where + "[0]"), as_node(e[1], where + "[1]"));
    }
    return Graph::build(std::move(specs), pairs);
}

Json graph_to_json(const Graph& g) {
    Json nodes = Json::array();
    for (NodeId v = 0; v < g.node_count(); ++v) {
        Json n = {{"id", v}, {"features", std::vector<double>(g.features(v).begin(), g.features(v).end())}};
        if (auto label = g.label(v)) n["label"] = *label;
        nodes.push_back(std::move(n));
    }
    Json edges = Json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
    return {{"directed", false}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

Model load_weights(const Json& doc) {
    if (!doc.is_object()) fail("weights", "expected an object");
    Activation act = Activation::relu;
    if (auto it = doc.find("activation"); it != doc.end()) {
        if (!it->is_string()) fail("activation", "expected a string");
        act = parse_activation(it->get<std::string>());
    }
    bool self_loop = true;
    if (auto it = doc.find("self_loop"); it != doc.end()) {
        if (!it->is_boolean()) fail("self_loop", "expected a boolean");
        self_loop = it->get<bool>();
    }
    Aggregation agg = Aggregation::sum;
    if (auto it = doc.find("aggregation"); it != doc.end()) {
        const std::string name = it->is_string() ? it->get<std::string>() : "";
        if (name == "mean") {
            agg = Aggregation::mean;
        } else if (name != "sum") {
            fail("aggregation", "expected \"sum\" or \"mean\"");
        }
    }
    const Json& layers = as_array(field(doc, "layers", "weights"), "layers");
    if (layers.empty()) fail("layers", "at least one layer is required");
    std::vector<Eigen::MatrixXd> mats;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = at("layers", l);
        const auto rows = as_count(field(layers[l], "rows", where), where + ".rows");
        const auto cols = as_count(field(layers[l], "cols", where), where + ".cols");
        const Json& data = as_array(field(layers[l], "data", where), where + ".data");
        if (data.size() != rows * cols) fail(where + ".data", "expected rows*cols values");
        Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    as_real(data[r * cols + c], at(where + ".data", r * cols + c));
            }
        }
        mats.push_back(std::move(mat));
    }
    Model m(std::move(mats), act, self_loop, agg);
    if (m.class_count() < 2) fail("layers", "the last layer needs at least two classes");
    return m;
}

Json model_to_json(const Model& m) {
    Json layers = Json::array();
    for (const auto& mat : m.layers()) {
        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(mat.size()));
        for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            for (Eigen::Index c = 0; c < mat.cols(); ++c) data.push_back(mat(r, c));
        }
        layers.push_back({{"rows", mat.rows()}, {"cols", mat.cols()}, {"data", std::move(data)}});
    }
    return {{"activation", std::string(to_string(m.activation()))},
            {"self_loop", m.self_loop()},
            {"aggregation", m.aggregation() == Aggregation::mean ? "mean" : "sum"},
            {"layers", std::move(layers)}};
}

EdgeWeights parse_edge_weights(const Json& doc, const Graph& g) {
    const Json& edges = as_array(field(doc, "edges", "edge weights"), "edges");
    EdgeWeights w;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = at("edges", i);
        const NodeId u = as_node(field(edges[i], "u", where), where + ".u");
        const NodeId v = as_node(field(edges[i], "v", where), where + ".v");
        const double weight = as_real(field(edges[i], "weight", where), where + ".weight");
        auto e = g.find_edge(u, v);
        if (!e) fail(where, "no such edge in the graph");
        if (w.weight.count(*e)) fail(where, "duplicate edge");
        w.weight[*e] = weight;
    }
    return w;
}

Json edge_weights_to_json(const EdgeWeights& w, const Graph& g) {
    Json edges = Json::array();
    for (const auto& [e, weight] : w.weight) {
        edges.push_back({{"u", g.edge(e).u}, {"v", g.edge(e).v}, {"weight", weight}});
    }
    return {{"edges", std::move(edges)}};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(tmp.string() + ": cannot open for writing");
        out << content;
        if (!out.flush()) throw Error(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

// --- explanation documents --------------------------------------------------

SubgraphDoc describe(const Graph& g, const Subgraph& s) {
    SubgraphDoc d;
    d.nodes.assign(s.node_set().begin(), s.node_set().end());
    for (EdgeId e : s.edge_set()) d.edges.emplace_back(g.edge(e).u, g.edge(e).v);
    return d;
}

ExplanationDocument make_document(const Graph& g, const Explanation& ex, std::uint32_t hops, double top_percent) {
    ExplanationDocument doc;
    doc.node = ex.target;
    doc.method = std::string(to_string(ex.method));
    doc.predicted_class = ex.full_prediction.argmax();
    doc.probs.assign(ex.full_prediction.probs.begin(), ex.full_prediction.probs.end());
    doc.explanation = describe(g, ex.explanation);
    doc.nu = ex.nu;
    doc.pair_count = ex.pairs.size();
    doc.enumerated = ex.enumerated;

    if (const ExplanationPair* p = ex.selected_pair()) {
        doc.counterfactual = describe(g, p->counterfactual.subgraph);
        doc.delta = p->delta_nodes;
        doc.mu = p->mu;
        doc.confounders = confounder_set(g, ex.target, hops, *p);
    } else {
        doc.confounders = l_hop_neighborhood(g, ex.target, hops);
    }
    if (ex.front) {
        const ScoredFront& f = *ex.front;
        doc.rank_sum = f.rank_sum[f.selected];
        doc.front_size = static_cast<std::size_t>(std::count(f.pareto.begin(), f.pareto.end(), true));
        const auto ties = tie_keys_of(ex.pairs);
        const auto order = order_by_rank_sum(f, ties);
        const auto keep = static_cast<std::size_t>(
            std::ceil(top_percent / 100.0 * static_cast<double>(order.size()) - 1e-9));
        for (std::size_t k = 0; k < std::min(std::max<std::size_t>(keep, 1), order.size()); ++k) {
            const std::size_t i = order[k];
            const ExplanationPair& p = ex.pairs[i];
            PairDoc pd;
            pd.explanation = describe(g, p.explanation.subgraph);
            pd.counterfactual = describe(g, p.counterfactual.subgraph);
            pd.delta = p.delta_nodes;
            pd.nu = p.explanation.nu;
            pd.nu_counterfactual = p.counterfactual.nu;
            pd.mu = p.mu;
            pd.r1 = f.r1[i];
            pd.r2 = f.r2[i];
            pd.rank_sum = f.rank_sum[i];
            pd.pareto = f.pareto[i];
            doc.top_pairs.push_back(std::move(pd));
        }
    }
    if (ex.weights) {
        for (const auto& [e, w] : ex.weights->weight) doc.edge_weights.push_back({g.edge(e).u, g.edge(e).v, w});
    }
    if (ex.shapley) {
        for (const auto& s : ex.shapley->entries) doc.shapley.push_back({s.node, s.sv, s.support_count});
    }
    return doc;
}

namespace {

Json subgraph_json(const SubgraphDoc& s) {
    Json edges = Json::array();
    for (const auto& [u, v] : s.edges) edges.push_back({u, v});
    return {{"nodes", s.nodes}, {"edges", std::move(edges)}};
}

SubgraphDoc subgraph_from(const Json& j, const std::string& where) {
    SubgraphDoc s;
    const Json& nodes = as_array(field(j, "nodes", where), where + ".nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) s.nodes.push_back(as_node(nodes[i], at(where + ".nodes", i)));
    const Json& edges = as_array(field(j, "edges", where), where + ".edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Json& e = as_array(edges[i], at(where + ".edges", i));
        if (e.size() != 2) fail(at(where + ".edges", i), "expected [u, v]");
        s.edges.emplace_back(as_node(e[0], where), as_node(e[1], where));
    }
    return s;
}

std::vector<NodeId> nodes_from(const Json& j, const std::string& where) {
    std::vector<NodeId> out;
    const Json& arr = as_array(j, where);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_node(arr[i], at(where, i)));
    return out;
}

}  // namespace

Json to_json(const ExplanationDocument& doc) {
    Json j = {{"manifest", doc.manifest}, {"node", doc.node}};
    if (doc.error) {
        j["error"] = *doc.error;
        return j;
    }
    j["method"] = doc.method;
    j["prediction"] = {{"class", doc.predicted_class}, {"probs", doc.probs}};
    j["explanation"] = subgraph_json(doc.explanation);
    j["counterfactual"] = doc.counterfactual ? subgraph_json(*doc.counterfactual) : Json(nullptr);
    j["delta"] = doc.delta;
    j["nu"] = doc.nu;
    j["mu"] = doc.mu ? Json(*doc.mu) : Json(nullptr);
    j["R"] = doc.rank_sum ? Json(*doc.rank_sum) : Json(nullptr);
    j["front_size"] = doc.front_size;
    j["pair_count"] = doc.pair_count;
    j["enumerated"] = doc.enumerated;
    j["confounders"] = doc.confounders;
    Json pairs = Json::array();
    for (const PairDoc& p : doc.top_pairs) {
        pairs.push_back({{"explanation", subgraph_json(p.explanation)},
                         {"counterfactual", subgraph_json(p.counterfactual)},
                         {"delta", p.delta},
                         {"nu", p.nu},
                         {"nu_counterfactual", p.nu_counterfactual},
                         {"mu", p.mu},
                         {"r1", p.r1},
                         {"r2", p.r2},
                         {"R", p.rank_sum},
                         {"pareto", p.pareto}});
    }
    j["top_pairs"] = std::move(pairs);
    if (!doc.edge_weights.empty()) {
        Json w = Json::array();
        for (const auto& e : doc.edge_weights) w.push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight}});
        j["edge_weights"] = std::move(w);
    }
    if (!doc.shapley.empty()) {
        Json s = Json::array();
        for (const auto& e : doc.shapley) s.push_back({{"node", e.node}, {"sv", e.sv}, {"support", e.support}});
        j["shapley"] = std::move(s);
    }
    return j;
}

ExplanationDocument document_from_json(const Json& j) {
    return with_context("document", [&] {
        ExplanationDocument doc;
        doc.manifest = field(j, "manifest", "document");
        doc.node = as_node(field(j, "node", "document"), "node");
        if (auto it = j.find("error"); it != j.end()) {
            doc.error = it->get<std::string>();
            return doc;
        }
        doc.method = field(j, "method", "document").get<std::string>();
        const Json& pred = field(j, "prediction", "document");
        doc.predicted_class = as_count(field(pred, "class", "prediction"), "prediction.class");
        for (const Json& p : as_array(field(pred, "probs", "prediction"), "prediction.probs")) {
            doc.probs.push_back(as_real(p, "prediction.probs"));
        }
        doc.explanation = subgraph_from(field(j, "explanation", "document"), "explanation");
        if (const Json& cf = field(j, "counterfactual", "document"); !cf.is_null()) {
            doc.counterfactual = subgraph_from(cf, "counterfactual");
        }
        doc.delta = nodes_from(field(j, "delta", "document"), "delta");
        doc.nu = as_real(field(j, "nu", "document"), "nu");
        if (const Json& mu = field(j, "mu", "document"); !mu.is_null()) doc.mu = as_real(mu, "mu");
        if (const Json& r = field(j, "R", "document"); !r.is_null()) doc.rank_sum = as_count(r, "R");
        doc.front_size = as_count(field(j, "front_size", "document"), "front_size");
        doc.pair_count = as_count(field(j, "pair_count", "document"), "pair_count");
        doc.enumerated = as_count(field(j, "enumerated", "document"), "enumerated");
        doc.confounders = nodes_from(field(j, "confounders", "document"), "confounders");
        const Json& pairs = as_array(field(j, "top_pairs", "document"), "top_pairs");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const std::string where = at("top_pairs", i);
            const Json& p = pairs[i];
            PairDoc pd;
            pd.explanation = subgraph_from(field(p, "explanation", where), where + ".explanation");
            pd.counterfactual = subgraph_from(field(p, "counterfactual", where), where + ".counterfactual");
            pd.delta = nodes_from(field(p, "delta", where), where + ".delta");
            pd.nu = as_real(field(p, "nu", where), where + ".nu");
            pd.nu_counterfactual = as_real(field(p, "nu_counterfactual", where), where + ".nu_counterfactual");
            pd.mu = as_real(field(p, "mu", where), where + ".mu");
            pd.r1 = as_count(field(p, "r1", where), where + ".r1");
            pd.r2 = as_count(field(p, "r2", where), where + ".r2");
            pd.rank_sum = as_count(field(p, "R", where), where + ".R");
            pd.pareto = field(p, "pareto", where).get<bool>();
            doc.top_pairs.push_back(std::move(pd));
        }
        if (auto it = j.find("edge_weights"); it != j.end()) {
            for (const Json& e : as_array(*it, "edge_weights")) {
                doc.edge_weights.push_back({as_node(field(e, "u", "edge_weights"), "edge_weights.u"),
                                            as_node(field(e, "v", "edge_weights"), "edge_weights.v"),
                                            as_real(field(e, "weight", "edge_weights"), "edge_weights.weight")});
            }
        }
        if (auto it = j.find("shapley"); it != j.end()) {
            for (const Json& e : as_array(*it, "shapley")) {
                doc.shapley.push_back({as_node(field(e, "node", "shapley"), "shapley.node"),
                                       as_real(field(e, "sv", "shapley"), "shapley.sv"),
                                       as_count(field(e, "support", "shapley"), "shapley.support")});
            }
        }
        return doc;
    });
}

std::string render_document(const ExplanationDocument& doc) { return to_json(doc).dump(2) + "\n"; }

// --- CSV --------------------------------------------------------------------

std::string format_real(double x) {
    if (x == 0.0) return "0";  // also folds -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf, end);
}

std::string robustness_csv(const std::vector<PerturbRecord>& records) {
    std::string out = kRobustnessHeader;
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.node) + ',' + std::string(to_string(r.kind)) + ',' + format_real(r.strength) + ',' +
               std::to_string(r.pred_before) + ',' + std::to_string(r.pred_after) + ',' + format_real(r.jaccard) +
               ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

}  // namespace moexp
