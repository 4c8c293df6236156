// Hard-EM driver: alternate closed-form parameter updates (M-step) with ICM
// label inference (E-step) until the labels stabilize. Initialization is
// outlier-free k-means per vertex kind; local optima are handled by seeded
// restarts keeping the run with the largest data likelihood.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "hcoda/icm.hpp"
#include "hcoda/util.hpp"

namespace hcoda {

struct RestartSummary {
    std::uint64_t seed = 0;
    double loglik = -std::numeric_limits<double>::infinity();
    int em_iterations = 0;
    bool converged = false;
};

struct FitResult {
    LabelAssignment labels;
    CommunityModel model;
    std::vector<std::size_t> node_outliers;  // node indices with label 0
    std::vector<std::size_t> edge_outliers;  // edge indices with label 0
    double data_loglik = -std::numeric_limits<double>::infinity();
    int em_iterations = 0;
    bool converged = false;
    long monotonicity_violations = 0;
    IcmResult last_icm;
    std::vector<RestartSummary> restart_summaries;

    bool operator==(const FitResult& o) const {
        return labels == o.labels && node_outliers == o.node_outliers &&
               edge_outliers == o.edge_outliers && data_loglik == o.data_loglik &&
               em_iterations == o.em_iterations && converged == o.converged;
    }
};

namespace detail {

/// Lloyd's k-means with a fixed iteration budget. Centers are seeded by
/// sampling distinct data points; if there are fewer distinct points than K
/// the surplus centers duplicate and their clusters come out empty. Returns
/// labels in 1..K; ties go to the lowest center index.
inline std::vector<int> kmeans_labels(const Rows& data, int K, std::mt19937_64& rng, int iters = 10) {
    std::vector<int> labels(data.size(), 1);
    if (data.empty() || K < 1) return labels;
    const std::size_t dim = data.front().size();

    std::set<std::vector<double>> distinct_set;
    for (const auto& row : data) distinct_set.emplace(row.begin(), row.end());
    std::vector<std::vector<double>> pool(distinct_set.begin(), distinct_set.end());

    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(K));
    for (int c = 0; c < K; ++c) {
        if (!pool.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            const std::size_t at = pick(rng);
            centers.push_back(pool[at]);
            pool.erase(pool.begin() + static_cast<long>(at));
        } else {
            centers.push_back(centers.empty() ? std::vector<double>(dim, 0.0) : centers.back());
        }
    }

    auto nearest = [&](std::span<const double> row) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < K; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double diff = row[j] - centers[c][j];
                d += diff * diff;
            }
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    };

    std::vector<int> assign(data.size(), 0);
    for (int it = 0; it < iters; ++it) {
        for (std::size_t b = 0; b < data.size(); ++b) assign[b] = nearest(data[b]);
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(K), std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(K), 0);
        for (std::size_t b = 0; b < data.size(); ++b) {
            ++counts[assign[b]];
            for (std::size_t j = 0; j < dim; ++j) sums[assign[b]][j] += data[b][j];
        }
        for (int c = 0; c < K; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its center
            for (std::size_t j = 0; j < dim; ++j)
                centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        }
    }
    for (std::size_t b = 0; b < data.size(); ++b) assign[b] = nearest(data[b]);
    for (std::size_t b = 0; b < data.size(); ++b) labels[b] = assign[b] + 1;
    return labels;
}

inline void reseed_empty_communities(ModelBlock& block, const Rows& data,
                                     std::span<const int> labels, const std::vector<int>& empties) {
    // Deterministic reseed: plant the empty community on the member with the
    // worst fit under its currently assigned community.
    for (int k : empties) {
        std::size_t worst = 0;
        double worst_ll = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t b = 0; b < data.size(); ++b) {
            if (labels[b] < 1) continue;
            const double ll = log_lik(block, data[b], labels[b]);
            if (ll < worst_ll) {
                worst_ll = ll;
                worst = b;
                found = true;
            }
        }
        if (!found) continue;
        if (block.family == Family::Gaussian) {
            auto& g = block.gaussians[k - 1];
            g.mean.assign(data[worst].begin(), data[worst].end());
        } else {
            auto& m = block.multinomials[k - 1];
            double total = 0.0;
            for (std::size_t l = 0; l < m.beta.size(); ++l) total += data[worst][l] + kMultinomialSmoothing;
            for (std::size_t l = 0; l < m.beta.size(); ++l)
                m.beta[l] = (data[worst][l] + kMultinomialSmoothing) / total;
        }
    }
}

inline void m_step_block(ModelBlock& block, const Rows& data, std::span<const int> labels,
                         const Hyperparams& hp) {
    std::vector<int> empties;
    if (block.family == Family::Gaussian)
        block.gaussians = update_gaussian(block.gaussians, data, labels, &empties);
    else
        block.multinomials = update_multinomial(block.multinomials, data, labels,
                                                kMultinomialSmoothing, &empties);
    if (hp.reseed_empty && !empties.empty()) reseed_empty_communities(block, data, labels, empties);
}

} // namespace detail

/// Outlier-free initialization: independent k-means over node attribute
/// vectors and (unless CODA) edge attribute vectors. No vertex starts at 0.
inline LabelAssignment init_labels(const AttributedGraph& g, int K, std::uint64_t seed,
                                   bool coda = false) {
    std::mt19937_64 node_rng(mix_seed(seed, 0));
    const Rows nodes = node_rows(g);
    LabelAssignment z = detail::kmeans_labels(nodes, K, node_rng);
    if (!coda) {
        std::mt19937_64 edge_rng(mix_seed(seed, 1));
        const Rows edges = edge_rows(g);
        auto edge_labels = detail::kmeans_labels(edges, K, edge_rng);
        // k-means numbers its clusters arbitrarily, and the node and edge runs
        // are independent, so the same community can come out under two
        // different ids. Renumber the edge clusters by maximum agreement with
        // the endpoint labels; otherwise the coupling terms start misaligned
        // and the attribute term is too strong for ICM to ever repair it.
        const auto idx = node_index_map(g);
        std::vector<std::vector<double>> agree(K, std::vector<double>(K, 0.0));
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const int c = edge_labels[e] - 1;
            agree[c][z[idx.at(g.edges[e].src)] - 1] += 1.0;
            agree[c][z[idx.at(g.edges[e].dst)] - 1] += 1.0;
        }
        std::vector<std::vector<double>> cost(K, std::vector<double>(K, 0.0));
        for (int c = 0; c < K; ++c)
            for (int k = 0; k < K; ++k) cost[c][k] = -agree[c][k];
        const auto renumber = detail::min_cost_assignment(cost);
        for (auto& lab : edge_labels) lab = renumber[lab - 1] + 1;
        z.insert(z.end(), edge_labels.begin(), edge_labels.end());
    }
    return z;
}

/// One EM run from a k-means start. Loops M-step (closed-form updates with
/// hard posteriors; outliers belong to no community) then E-step (ICM),
/// stopping when consecutive label vectors are identical.
inline FitResult fit(const Hmrf& h, const AttributedGraph& g, const Hyperparams& hp) {
    hp.validate();
    const Rows nodes = node_rows(g);
    const Rows edges = edge_rows(g);

    FitResult res;
    res.labels = init_labels(g, hp.k, hp.seed, hp.coda);
    res.model.node_block = initial_block(g.node_kind, nodes, hp.k, hp.rho0_node);
    if (!hp.coda) res.model.edge_block = initial_block(g.edge_kind, edges, hp.k, hp.rho0_edge);

    std::mt19937_64 sweep_rng(mix_seed(hp.seed, 2));
    for (int it = 1; it <= hp.max_em_iters; ++it) {
        res.em_iterations = it;
        detail::m_step_block(res.model.node_block, nodes,
                             std::span<const int>(res.labels.data(), h.n_nodes), hp);
        if (!hp.coda)
            detail::m_step_block(res.model.edge_block, edges,
                                 std::span<const int>(res.labels.data() + h.n_nodes, edges.size()), hp);

        IcmResult icm = icm_infer(h, nodes, edges, res.model, hp, res.labels, &sweep_rng);
        res.monotonicity_violations += icm.monotonicity_violations;
        const bool stable = icm.labels == res.labels;
        res.labels = icm.labels;
        res.last_icm = std::move(icm);
        if (stable) {
            res.converged = true;
            break;
        }
    }

    for (std::size_t i = 0; i < h.n_nodes; ++i)
        if (res.labels[i] == 0) res.node_outliers.push_back(i);
    if (!hp.coda)
        for (std::size_t e = 0; e < h.n_edges(); ++e)
            if (res.labels[h.n_nodes + e] == 0) res.edge_outliers.push_back(e);
    res.data_loglik = total_data_log_likelihood(res.model, nodes, edges, res.labels);
    return res;
}

/// n independent fits seeded base..base+n-1; keeps the restart with the
/// largest total data log-likelihood (ties: lowest seed).
inline FitResult fit_with_restarts(const Hmrf& h, const AttributedGraph& g, Hyperparams hp,
                                   int n, std::uint64_t base_seed) {
    if (n < 1) throw std::invalid_argument("restart count must be >= 1");
    FitResult best;
    std::vector<RestartSummary> summaries;
    for (int i = 0; i < n; ++i) {
        hp.seed = base_seed + static_cast<std::uint64_t>(i);
        FitResult r = fit(h, g, hp);
        summaries.push_back({hp.seed, r.data_loglik, r.em_iterations, r.converged});
        if (i == 0 || r.data_loglik > best.data_loglik) best = std::move(r);
    }
    best.restart_summaries = std::move(summaries);
    return best;
}

/// The CODA ablation: community detection from node data and linkage only.
/// Edge-vertices leave the vertex set and the edge-dependent clique weights
/// are zeroed, so edge attribute data is never read.
inline Hyperparams coda_mode(Hyperparams hp) {
    hp.lambda2 = 0.0;
    hp.lambda3 = 0.0;
    hp.coda = true;
    return hp;
}

} // namespace hcoda
