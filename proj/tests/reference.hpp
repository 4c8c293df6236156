// Independent reference implementations used as test oracles. Everything in
// here recomputes results from first principles (raw clique records, direct
// numeric maximization, exhaustive permutations) rather than calling the
// library's production paths, so agreement is evidence and not tautology.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hcoda/hcoda.hpp"

namespace ref {

inline int delta(long long x) { return x == 0 ? 1 : 0; }

inline int psi(int a, int b, int c, hcoda::PsiMode mode) {
    const int s = delta(a - b) + delta(a - c) + delta(b - c);
    return mode == hcoda::PsiMode::AtLeastTwo ? (s >= 1 ? 1 : 0) : (s <= 1 ? 1 : 0);
}

// Conditional node energy re-derived by scanning every clique record and
// summing the three coupling terms with the neighborhood rules applied
// inline: member terms drop when the member's label is 0, and the triangle
// needs both other members present.
inline double node_energy(const hcoda::Hmrf& h, const hcoda::Rows& nodes,
                          const hcoda::CommunityModel& model, const hcoda::Hyperparams& hp,
                          const hcoda::LabelAssignment& z, std::size_t i, int k) {
    double u = -hcoda::log_lik(model.node_block, nodes[i], k);
    const bool edges_active = !hp.coda && z.size() > h.n_nodes;
    for (std::size_t e = 0; e < h.cliques.size(); ++e) {
        const auto& c = h.cliques[e];
        if (c.i != i && c.j != i) continue;
        const std::size_t other = (c.i == i) ? c.j : c.i;
        const int zj = z[other];
        const int ze = edges_active ? z[h.n_nodes + e] : 0;
        if (zj != 0) u -= hp.lambda1 * c.w_node_node * delta(k - zj);
        if (edges_active && ze != 0)
            u -= hp.lambda2 * (c.i == i ? c.w_i_edge : c.w_j_edge) * delta(k - ze);
        if (edges_active && zj != 0 && ze != 0)
            u -= hp.lambda3 * c.w_triangle * ref::psi(k, zj, ze, hp.psi_mode);
    }
    return u;
}

inline double edge_energy(const hcoda::Hmrf& h, const hcoda::Rows& edges,
                          const hcoda::CommunityModel& model, const hcoda::Hyperparams& hp,
                          const hcoda::LabelAssignment& z, std::size_t b, int k) {
    const std::size_t e = b - h.n_nodes;
    const auto& c = h.cliques[e];
    double u = -hcoda::log_lik(model.edge_block, edges[e], k);
    const int zi = z[c.i];
    const int zj = z[c.j];
    if (zi != 0) u -= hp.lambda2 * c.w_i_edge * delta(zi - k);
    if (zj != 0) u -= hp.lambda2 * c.w_j_edge * delta(zj - k);
    if (zi != 0 && zj != 0) u -= hp.lambda3 * c.w_triangle * ref::psi(zi, zj, k, hp.psi_mode);
    return u;
}

// Golden-section search for the maximum of a unimodal function.
template <typename F>
inline double golden_max(F f, double lo, double hi, int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return (a + b) / 2.0;
}

// Weighted 1-D Gaussian MLE found by direct numeric maximization of the
// weighted log-likelihood (mean first; the optimum mean does not depend on
// sigma, then sigma given that mean).
inline std::pair<double, double> numeric_gaussian_mle(const std::vector<double>& xs,
                                                      const std::vector<double>& ws) {
    double lo = xs.front(), hi = xs.front();
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = std::max(hi - lo, 1.0);
    auto loglik = [&](double mu, double sigma) {
        double ll = 0.0;
        for (std::size_t b = 0; b < xs.size(); ++b) {
            const double d = xs[b] - mu;
            ll += ws[b] * (-0.5 * d * d / (sigma * sigma) - std::log(sigma) -
                           0.5 * std::log(2.0 * std::acos(-1.0)));
        }
        return ll;
    };
    const double mu = golden_max([&](double m) { return loglik(m, 1.0); }, lo - span, hi + span);
    const double sigma = golden_max([&](double s) { return loglik(mu, s); }, 1e-4, 2.0 * span + 1.0);
    return {mu, sigma};
}

// Best label bijection by exhaustive permutation (usable for K <= 8).
inline double brute_force_ca(const std::vector<int>& pred, const std::vector<int>& truth) {
    int K = 1;
    for (std::size_t b = 0; b < truth.size(); ++b)
        K = std::max({K, pred[b], truth[b]});
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 1);
    std::size_t eligible = 0;
    for (int t : truth)
        if (t != 0) ++eligible;
    if (eligible == 0) return 1.0;
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t b = 0; b < truth.size(); ++b) {
            if (truth[b] == 0 || pred[b] == 0) continue;
            if (perm[pred[b] - 1] == truth[b]) ++hits;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(eligible);
}

// Minimum assignment cost by exhaustive permutation (n <= 8).
inline double brute_force_assignment_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost[i][perm[i]];
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Deterministic pseudo-random doubles for building small test fixtures
// without pulling in the library's seeding helpers.
struct Lcg {
    std::uint64_t state;

    explicit Lcg(std::uint64_t seed) : state(seed * 2862933555777941757ULL + 3037000493ULL) {}

    std::uint64_t next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 11;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() % (1ULL << 40)) /
                                 static_cast<double>(1ULL << 40));
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

}  // namespace ref
