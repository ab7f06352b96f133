#include "moexp/pareto.hpp"

#include <algorithm>
#include <numeric>

#include "moexp/error.hpp"

namespace moexp {

bool dominates(const Objectives& a, const Objectives& b) {
    return a.nu >= b.nu && a.mu_abs >= b.mu_abs && (a.nu > b.nu || a.mu_abs > b.mu_abs);
}

std::vector<bool> pareto_front(std::span<const Objectives> points) {
    const std::size_t n = points.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].nu != points[b].nu) return points[a].nu > points[b].nu;
        return points[a].mu_abs > points[b].mu_abs;
    });

    // Sweep groups of equal nu in descending order. Within a group only the
    // largest |mu| can survive; it survives iff it beats every |mu| seen at a
    // strictly larger nu.
    std::vector<bool> flags(n, false);
    bool have_best = false;
    double best_mu = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start;
        while (end < n && points[idx[end]].nu == points[idx[start]].nu) ++end;
        const double group_top = points[idx[start]].mu_abs;
        if (!have_best || group_top > best_mu) {
            for (std::size_t k = start; k < end && points[idx[k]].mu_abs == group_top; ++k) flags[idx[k]] = true;
        }
        if (!have_best || group_top > best_mu) best_mu = group_top;
        have_best = true;
        start = end;
    }
    return flags;
}

std::vector<std::size_t> competition_rank(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) {
        rank[idx[k]] = (k > 0 && values[idx[k]] == values[idx[k - 1]]) ? rank[idx[k - 1]] : k + 1;
    }
    return rank;
}

namespace {

ScoredFront rank_all(std::span<const Objectives> points, std::span<const TieKey> ties) {
    if (points.empty()) throw Error("selection needs at least one pair");
    if (ties.size() != points.size()) throw Error("tie keys do not match pairs");
    std::vector<double> nu(points.size());
    std::vector<double> mu(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        nu[i] = points[i].nu;
        mu[i] = points[i].mu_abs;
    }
    ScoredFront f;
    f.r1 = competition_rank(nu);
    f.r2 = competition_rank(mu);
    f.rank_sum.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) f.rank_sum[i] = f.r1[i] + f.r2[i];
    f.pareto = pareto_front(points);
    return f;
}

std::size_t rank_gap(const ScoredFront& f, std::size_t i) { return f.r1[i] > f.r2[i] ? f.r1[i] - f.r2[i] : f.r2[i] - f.r1[i]; }

}  // namespace

ScoredFront select_comprehensive(std::span<const Objectives> points, std::span<const TieKey> ties) {
    ScoredFront f = rank_all(points, ties);
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (f.rank_sum[i] < f.rank_sum[best] || (f.rank_sum[i] == f.rank_sum[best] && ties[i] < ties[best])) best = i;
    }
    f.selected = best;
    return f;
}

ScoredFront select_balanced(std::span<const Objectives> points, std::span<const TieKey> ties) {
    ScoredFront f = rank_all(points, ties);
    auto key = [&](std::size_t i) { return std::pair(rank_gap(f, i), f.rank_sum[i]); };
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (key(i) < key(best) || (key(i) == key(best) && ties[i] < ties[best])) best = i;
    }
    f.selected = best;
    return f;
}

std::vector<Objectives> objectives_of(std::span<const ExplanationPair> pairs) {
    std::vector<Objectives> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back({p.explanation.nu, p.mu_abs});
    return out;
}

std::vector<TieKey> tie_keys_of(std::span<const ExplanationPair> pairs) {
    std::vector<TieKey> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const auto ex = p.explanation.subgraph.edge_set();
        const auto cf = p.counterfactual.subgraph.edge_set();
        out.push_back({p.explanation.subgraph.size(), {ex.begin(), ex.end()}, {cf.begin(), cf.end()}});
    }
    return out;
}

ScoredFront select_comprehensive(std::span<const ExplanationPair> pairs) {
    auto pts = objectives_of(pairs);
    auto ties = tie_keys_of(pairs);
    return select_comprehensive(pts, ties);
}

ScoredFront select_balanced(std::span<const ExplanationPair> pairs) {
    auto pts = objectives_of(pairs);
    auto ties = tie_keys_of(pairs);
    return select_balanced(pts, ties);
}

std::vector<std::size_t> order_by_rank_sum(const ScoredFront& front, std::span<const TieKey> ties) {
    std::vector<std::size_t> idx(front.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (front.rank_sum[a] != front.rank_sum[b]) return front.rank_sum[a] < front.rank_sum[b];
        return ties[a] < ties[b];
    });
    return idx;
}

}  // namespace moexp
