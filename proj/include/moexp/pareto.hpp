#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "moexp/pairs.hpp"

namespace moexp {

/// The two maximized objectives of a pair: simulatability and |mu|.
struct Objectives {
    double nu;
    double mu_abs;
};

/// Deterministic final tie-break between pairs with equal selection keys:
/// smaller explanation first, then explanation edge ids, then counterfactual
/// edge ids (lexicographic).
struct TieKey {
    std::size_t explanation_size = 0;
    std::vector<EdgeId> explanation_edges;
    std::vector<EdgeId> counterfactual_edges;

    friend bool operator<(const TieKey& a, const TieKey& b) {
        return std::tie(a.explanation_size, a.explanation_edges, a.counterfactual_edges) <
               std::tie(b.explanation_size, b.explanation_edges, b.counterfactual_edges);
    }
};

/// a dominates b: no worse in both objectives and strictly better in one.
bool dominates(const Objectives& a, const Objectives& b);

/// true for every point no other point dominates. O(n log n).
std::vector<bool> pareto_front(std::span<const Objectives> points);

struct ScoredFront {
    std::vector<std::size_t> r1;        // competition rank by nu, descending
    std::vector<std::size_t> r2;        // competition rank by |mu|, descending
    std::vector<std::size_t> rank_sum;  // r1 + r2
    std::vector<bool> pareto;
    std::size_t selected = 0;

    std::size_t size() const { return r1.size(); }
};

/// Competition ranks ("1,1,3"): 1 + number of strictly better values.
std::vector<std::size_t> competition_rank(std::span<const double> values);

/// argmin of r1 + r2; ties by the TieKey order. Throws on empty input.
ScoredFront select_comprehensive(std::span<const Objectives> points, std::span<const TieKey> ties);
/// argmin of |r1 - r2|; ties by smaller r1 + r2, then the TieKey order.
ScoredFront select_balanced(std::span<const Objectives> points, std::span<const TieKey> ties);

std::vector<Objectives> objectives_of(std::span<const ExplanationPair> pairs);
std::vector<TieKey> tie_keys_of(std::span<const ExplanationPair> pairs);

ScoredFront select_comprehensive(std::span<const ExplanationPair> pairs);
ScoredFront select_balanced(std::span<const ExplanationPair> pairs);

/// Indices ordered by (rank sum, TieKey); used for top-p% listings.
std::vector<std::size_t> order_by_rank_sum(const ScoredFront& front, std::span<const TieKey> ties);

}  // namespace moexp
