// Iterated conditional modes: sequential single-vertex label updates to a
// local optimum of the joint posterior energy, plus rate-based outlier
// selection over the converged best-normal energies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcoda/energy.hpp"

namespace hcoda {

struct IcmResult {
    LabelAssignment labels;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> best_energy;  // U_b(k-hat) per active vertex
    std::vector<int> best_label;      // k-hat per active vertex, in 1..K
    long monotonicity_violations = 0; // populated only with debug_checks
};

namespace detail {

// -log_lik per (vertex, community), frozen for one ICM call.
struct DataTermCache {
    std::size_t n_active = 0;
    int k = 0;
    std::vector<double> terms;  // n_active * k

    double at(std::size_t b, int label) const { return terms[b * k + (label - 1)]; }
};

inline DataTermCache make_data_cache(const Hmrf& h, const Rows& nodes, const Rows& edges,
                                     const CommunityModel& model, const Hyperparams& hp,
                                     std::size_t n_active) {
    DataTermCache cache;
    cache.n_active = n_active;
    cache.k = hp.k;
    cache.terms.resize(n_active * static_cast<std::size_t>(hp.k));
    for (std::size_t b = 0; b < n_active; ++b) {
        const bool node = h.is_node_vertex(b);
        for (int k = 1; k <= hp.k; ++k)
            cache.terms[b * hp.k + (k - 1)] =
                node ? -log_lik(model.node_block, nodes[b], k)
                     : -log_lik(model.edge_block, edges[h.edge_of(b)], k);
    }
    return cache;
}

inline double conditional_energy(const Hmrf& h, const Hyperparams& hp, const LabelAssignment& z,
                                 const DataTermCache& cache, std::size_t b, int k) {
    const double clique = h.is_node_vertex(b) ? node_clique_energy(h, hp, z, b, k)
                                              : edge_clique_energy(h, hp, z, b, k);
    return cache.at(b, k) + clique;
}

} // namespace detail

/// argmin over k in 1..K of the vertex's conditional energy; ties broken by
/// the smallest k. Returns (k-hat, U_b(k-hat)).
inline std::pair<int, double> best_normal_label(const Hmrf& h, const Rows& nodes, const Rows& edges,
                                                const CommunityModel& model, const Hyperparams& hp,
                                                const LabelAssignment& z, std::size_t b) {
    int best_k = 1;
    double best_u = h.is_node_vertex(b) ? node_energy(h, nodes, model, hp, z, b, 1)
                                        : edge_energy(h, edges, model, hp, z, b, 1);
    for (int k = 2; k <= hp.k; ++k) {
        const double u = h.is_node_vertex(b) ? node_energy(h, nodes, model, hp, z, b, k)
                                             : edge_energy(h, edges, model, hp, z, b, k);
        if (u < best_u) {
            best_u = u;
            best_k = k;
        }
    }
    return {best_k, best_u};
}

/// Indices of the ceil(r * n) entries with the largest energy (worst fit),
/// ties at the cutoff resolved toward the lower index.
inline std::vector<std::size_t> select_outliers_by_rate(std::span<const double> energies, double r) {
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("outlier rate must be in [0, 1)");
    const std::size_t n = energies.size();
    const std::size_t count = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(r * static_cast<double>(n))), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return energies[a] > energies[b];
    });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

/// Algorithm: sweep the vertices in fixed order (node-vertices by index,
/// then edge-vertices), setting each label to the conditional argmin, until
/// a sweep changes nothing or the sweep cap is hit. In threshold mode a
/// vertex is labeled 0 whenever a0 < U_b(k-hat); in rate mode all vertices
/// keep their best normal label during sweeps and the worst-fitting fraction
/// per vertex kind is relabeled 0 after convergence.
inline IcmResult icm_infer(const Hmrf& h, const Rows& nodes, const Rows& edges,
                           const CommunityModel& model, const Hyperparams& hp,
                           LabelAssignment z, std::mt19937_64* order_rng = nullptr) {
    hp.validate();
    const std::size_t n_active = hp.coda ? h.n_nodes : h.n_vertices();
    if (z.size() != n_active)
        throw std::invalid_argument("label assignment size does not match active vertex set");

    IcmResult res;
    res.best_energy.assign(n_active, 0.0);
    res.best_label.assign(n_active, 1);

    const auto cache = detail::make_data_cache(h, nodes, edges, model, hp, n_active);
    const bool rate = hp.rate_mode();
    const double a0 = rate ? 0.0 : outlier_energy(hp);

    std::vector<std::size_t> order(n_active);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 local_rng(hp.seed);
    std::mt19937_64* rng = order_rng ? order_rng : &local_rng;

    for (int sweep = 0; sweep < hp.max_icm_sweeps; ++sweep) {
        if (hp.randomized_sweep) std::shuffle(order.begin(), order.end(), *rng);
        std::size_t changed = 0;
        for (std::size_t b : order) {
            int best_k = 1;
            double best_u = detail::conditional_energy(h, hp, z, cache, b, 1);
            for (int k = 2; k <= hp.k; ++k) {
                const double u = detail::conditional_energy(h, hp, z, cache, b, k);
                if (u < best_u) {
                    best_u = u;
                    best_k = k;
                }
            }
            const int old = z[b];
            const int next = (!rate && a0 < best_u) ? 0 : best_k;
            if (hp.debug_checks) {
                // A single-site update may never raise the vertex's own
                // conditional energy given the others. U(0) exists only in
                // threshold mode; rate-mode zeros have no comparable energy.
                const double new_u = next == 0 ? a0 : detail::conditional_energy(h, hp, z, cache, b, next);
                if (old != 0 || !rate) {
                    const double old_u = old == 0 ? a0 : detail::conditional_energy(h, hp, z, cache, b, old);
                    if (new_u > old_u + 1e-9) ++res.monotonicity_violations;
                }
            }
            res.best_energy[b] = best_u;
            res.best_label[b] = best_k;
            if (next != old) {
                z[b] = next;
                ++changed;
            }
        }
        ++res.sweeps;
        if (changed == 0) {
            res.converged = true;
            break;
        }
    }

    if (rate && *hp.outlier_rate > 0.0) {
        std::span<const double> all(res.best_energy);
        for (std::size_t b : select_outliers_by_rate(all.subspan(0, h.n_nodes), *hp.outlier_rate))
            z[b] = 0;
        if (n_active > h.n_nodes)
            for (std::size_t e : select_outliers_by_rate(all.subspan(h.n_nodes), *hp.outlier_rate))
                z[h.n_nodes + e] = 0;
    }
    res.labels = std::move(z);
    return res;
}

} // namespace hcoda
