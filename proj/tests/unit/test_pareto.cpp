#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "moexp/pareto.hpp"
#include "moexp/rng.hpp"

using namespace moexp;

namespace {

std::vector<TieKey> sized(std::vector<std::size_t> sizes) {
    std::vector<TieKey> out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out.push_back({sizes[i], {static_cast<EdgeId>(i)}, {}});
    }
    return out;
}

std::vector<TieKey> distinct(std::size_t n) { return sized(std::vector<std::size_t>(n, 2)); }

std::vector<Objectives> random_points(moexp::Rng& rng, std::size_t n) {
    std::vector<Objectives> pts;
    for (std::size_t i = 0; i < n; ++i) {
        // coarse grid to force ties
        pts.push_back({-static_cast<double>(rng.below(6)) / 4.0, static_cast<double>(rng.below(6)) / 8.0});
    }
    return pts;
}

std::vector<bool> oracle_front(const std::vector<Objectives>& pts) {
    std::vector<oracle::Point> p;
    for (const auto& o : pts) p.push_back({o.nu, o.mu_abs});
    return oracle::pareto_flags(p);
}

}  // namespace

TEST_CASE("dominates") {
    CHECK(dominates({-0.1, 0.5}, {-0.3, 0.4}));
    CHECK(!dominates({-0.1, 0.5}, {-0.1, 0.5}));
    CHECK(!dominates({-0.1, 0.4}, {-0.2, 0.7}));
    CHECK(!dominates({-0.2, 0.7}, {-0.1, 0.4}));
    CHECK(dominates({-0.1, 0.5}, {-0.1, 0.4}));
}

TEST_CASE("pareto front examples") {
    const std::vector<Objectives> three{{-0.1, 0.5}, {-0.2, 0.7}, {-0.3, 0.4}};
    CHECK(pareto_front(three) == std::vector<bool>{true, true, false});
    const std::vector<Objectives> same(4, Objectives{-0.2, 0.3});
    CHECK(pareto_front(same) == std::vector<bool>(4, true));
    const std::vector<Objectives> one{{-1.0, 0.0}};
    CHECK(pareto_front(one) == std::vector<bool>{true});
}

TEST_CASE("pareto front equals the all-pairs oracle") {
    moexp::Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const auto pts = random_points(rng, 1 + rng.below(30));
        CHECK(pareto_front(pts) == oracle_front(pts));
    }
}

TEST_CASE("competition ranking") {
    const std::vector<double> v{0.5, 0.9, 0.5, 0.1};
    CHECK(competition_rank(v) == std::vector<std::size_t>{2, 1, 2, 4});
}

TEST_CASE("comprehensive selection: dominating pair wins") {
    const std::vector<Objectives> pts{{-0.1, 0.9}, {-0.2, 0.5}, {-0.3, 0.6}};
    const ScoredFront f = select_comprehensive(pts, distinct(3));
    CHECK(f.r1 == std::vector<std::size_t>{1, 2, 3});
    CHECK(f.r2 == std::vector<std::size_t>{1, 3, 2});
    CHECK(f.rank_sum == std::vector<std::size_t>{2, 5, 5});
    CHECK(f.selected == 0);
}

TEST_CASE("comprehensive selection: equal scores fall back to the smaller explanation") {
    const std::vector<Objectives> pts{{-0.2, 0.4}, {-0.2, 0.4}};
    const ScoredFront f = select_comprehensive(pts, sized({3, 2}));
    CHECK(f.r1 == std::vector<std::size_t>{1, 1});
    CHECK(f.r2 == std::vector<std::size_t>{1, 1});
    CHECK(f.selected == 1);
}

TEST_CASE("balanced selection") {
    const std::vector<Objectives> mirror{{-0.1, 0.1}, {-0.2, 0.2}, {-0.3, 0.3}};
    const ScoredFront m = select_balanced(mirror, distinct(3));
    CHECK(m.r1 == std::vector<std::size_t>{1, 2, 3});
    CHECK(m.r2 == std::vector<std::size_t>{3, 2, 1});
    CHECK(m.selected == 1);

    const std::vector<Objectives> one{{-0.5, 0.5}};
    CHECK(select_balanced(one, distinct(1)).selected == 0);

    // A:(-0.1,0.9) B:(-0.5,0.5) C:(-0.2,1.0): B is balanced but dominated
    const std::vector<Objectives> dent{{-0.1, 0.9}, {-0.5, 0.5}, {-0.2, 1.0}};
    const ScoredFront d = select_balanced(dent, distinct(3));
    CHECK(d.r1 == std::vector<std::size_t>{1, 3, 2});
    CHECK(d.r2 == std::vector<std::size_t>{2, 3, 1});
    CHECK(d.selected == 1);
    CHECK(!d.pareto[1]);
    CHECK(select_comprehensive(dent, distinct(3)).rank_sum[1] > 3);
}

TEST_CASE("selection is never dominated") {
    moexp::Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pts = random_points(rng, 1 + rng.below(25));
        const ScoredFront f = select_comprehensive(pts, distinct(pts.size()));
        CHECK(f.pareto[f.selected]);
        for (const auto& p : pts) CHECK(!dominates(p, pts[f.selected]));
    }
}

TEST_CASE("selection depends on orderings only") {
    moexp::Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto pts = random_points(rng, 2 + rng.below(15));
        const auto ties = distinct(pts.size());
        const ScoredFront a = select_comprehensive(pts, ties);
        auto moved = pts;
        for (auto& p : moved) {
            p.nu = std::exp(3.0 * p.nu) - 7.0;  // strictly increasing
            p.mu_abs = p.mu_abs * p.mu_abs * p.mu_abs + 1.0;
        }
        const ScoredFront b = select_comprehensive(moved, ties);
        CHECK(a.r1 == b.r1);
        CHECK(a.r2 == b.r2);
        CHECK(a.rank_sum == b.rank_sum);
        CHECK(a.selected == b.selected);
        CHECK(select_balanced(pts, ties).selected == select_balanced(moved, ties).selected);
    }
}

TEST_CASE("selection is permutation invariant") {
    moexp::Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = random_points(rng, 2 + rng.below(15));
        const auto ties = distinct(pts.size());
        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        std::vector<Objectives> p2;
        std::vector<TieKey> t2;
        for (std::size_t i : perm) {
            p2.push_back(pts[i]);
            t2.push_back(ties[i]);
        }
        CHECK(perm[select_comprehensive(p2, t2).selected] == select_comprehensive(pts, ties).selected);
        CHECK(perm[select_balanced(p2, t2).selected] == select_balanced(pts, ties).selected);
    }
}

TEST_CASE("order by rank sum") {
    const std::vector<Objectives> pts{{-0.3, 0.1}, {-0.1, 0.9}, {-0.2, 0.5}};
    const auto ties = distinct(3);
    const ScoredFront f = select_comprehensive(pts, ties);
    CHECK(order_by_rank_sum(f, ties) == std::vector<std::size_t>{1, 2, 0});
}
