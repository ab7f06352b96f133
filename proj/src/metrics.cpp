#include "moexp/metrics.hpp"

#include <cmath>

#include "moexp/error.hpp"

namespace moexp {

double simulatability(const ClassDistribution& full, const ClassDistribution& sub, double epsilon) {
    if (full.size() != sub.size()) throw Error("distribution length mismatch");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error("smoothing must be in [0,1)");
    const double uniform = epsilon / static_cast<double>(full.size());
    // KL(p||q) + KL(q||p) = sum_k (p_k - q_k)(log p_k - log q_k); each term is
    // invariant under swapping p and q, so the result is bitwise symmetric.
    double total = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
        const double p = (1.0 - epsilon) * full[k] + uniform;
        const double q = (1.0 - epsilon) * sub[k] + uniform;
        if (p == q) continue;
        total += (p - q) * (std::log(p) - std::log(q));
    }
    return total == 0.0 ? 0.0 : -total;
}

double cf_relevance(double nu_explanation, double nu_counterfactual, std::size_t delta_size) {
    if (delta_size == 0) throw Error("counterfactual must remove at least one node");
    return (nu_explanation - nu_counterfactual) / static_cast<double>(delta_size);
}

}  // namespace moexp
