#pragma once

#include <cstddef>

#include "moexp/gcn.hpp"

namespace moexp {

inline constexpr double kDefaultSmoothing = 1e-9;

/// Negative symmetric KL divergence between the full-graph prediction and a
/// subgraph prediction, after mixing both with the uniform distribution:
/// p <- (1 - eps) p + eps / K. Always <= 0; exactly 0 on equal inputs and
/// bitwise symmetric in its arguments.
double simulatability(const ClassDistribution& full, const ClassDistribution& sub, double epsilon = kDefaultSmoothing);

/// (nu_explanation - nu_counterfactual) / delta_size. Throws on delta_size == 0.
double cf_relevance(double nu_explanation, double nu_counterfactual, std::size_t delta_size);

}  // namespace moexp
