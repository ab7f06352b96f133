#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "moexp/io.hpp"
#include "moexp/synth.hpp"

namespace moexp {

struct TargetSelection {
    std::vector<NodeId> nodes;
    bool all = false;  // "all-test": every node of the graph

    std::vector<NodeId> resolve(const Graph& g) const;
};

struct RunConfig {
    std::filesystem::path graph_path;
    std::filesystem::path weights_path;
    std::filesystem::path edge_weights_path;  // external-weights method only
    TargetSelection targets;
    ExplainConfig explain;
    std::filesystem::path output;  // directory for explain, file ("-" = stdout) otherwise
    std::size_t jobs = 1;
    bool keep_going = false;
};

/// --seed unless MOEXP_SEED is set to an unsigned integer.
std::uint64_t resolve_seed(std::uint64_t flag_value);

/// Writes <output>/node_<id>.json per target. Returns the process exit code:
/// 0 when every target succeeded or keep_going is set, 1 otherwise.
int explain_command(const RunConfig& cfg, std::ostream& log);

/// CSV: index,parent,size,nodes,edges (one row per enumerated subgraph).
int enumerate_command(const RunConfig& cfg, std::ostream& log);

/// CSV: target,node,sv,support_count.
int shapley_command(const RunConfig& cfg, std::ostream& log);

int robustness_command(const RunConfig& cfg, const SweepConfig& sweep, std::ostream& log);

int synth_command(SynthKind kind, const SynthParams& params, std::uint64_t seed,
                  const std::filesystem::path& graph_out, const std::filesystem::path& weights_out,
                  std::ostream& log);

/// The run manifest embedded in every explanation document.
Json make_manifest(const RunConfig& cfg);

}  // namespace moexp
