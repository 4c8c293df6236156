// Community data models: per-community log-likelihoods (diagonal Gaussian,
// multinomial), the uniform outlier density, and the hard-EM parameter
// updates. Node data and edge data get separate parameter blocks that share
// the community label space.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcoda/graph.hpp"

namespace hcoda {

inline constexpr double kSigmaFloor = 1e-6;                       // on standard deviations
inline constexpr double kVarianceFloor = kSigmaFloor * kSigmaFloor;
inline constexpr double kMultinomialSmoothing = 1e-3;

enum class Family { Gaussian, Multinomial };

// Diagonal Gaussian; dimension 1 is the univariate case.
struct GaussianParams {
    std::vector<double> mean;
    std::vector<double> var;
};

struct MultinomialParams {
    std::vector<double> beta;  // probabilities over the vocabulary, sum to 1
};

/// One data family for one vertex kind: K community parameter sets plus the
/// uniform outlier density rho0.
struct ModelBlock {
    Family family = Family::Gaussian;
    std::vector<GaussianParams> gaussians;
    std::vector<MultinomialParams> multinomials;
    double rho0 = 1.0;

    std::size_t communities() const {
        return family == Family::Gaussian ? gaussians.size() : multinomials.size();
    }
    std::size_t dim() const {
        if (family == Family::Gaussian)
            return gaussians.empty() ? 0 : gaussians.front().mean.size();
        return multinomials.empty() ? 0 : multinomials.front().beta.size();
    }
};

struct CommunityModel {
    ModelBlock node_block;
    ModelBlock edge_block;
};

// Attribute rows for one vertex kind; spans reference the graph's storage,
// which is immutable while a fit runs.
using Rows = std::vector<std::span<const double>>;

inline Rows node_rows(const AttributedGraph& g) {
    Rows r;
    r.reserve(g.nodes.size());
    for (const auto& n : g.nodes) r.emplace_back(n.attrs);
    return r;
}

inline Rows edge_rows(const AttributedGraph& g) {
    Rows r;
    r.reserve(g.edges.size());
    for (const auto& e : g.edges) r.emplace_back(e.attrs);
    return r;
}

/// ln P(X_b = s | Z_b = k) for k in 1..K.
inline double log_lik(const ModelBlock& m, std::span<const double> s, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > m.communities())
        throw std::invalid_argument("community index out of range");
    if (s.size() != m.dim())
        throw std::invalid_argument("data dimension does not match model block");
    if (m.family == Family::Gaussian) {
        const auto& g = m.gaussians[k - 1];
        double ll = -0.5 * static_cast<double>(s.size()) * std::log(2.0 * std::numbers::pi);
        for (std::size_t d = 0; d < s.size(); ++d) {
            const double diff = s[d] - g.mean[d];
            ll -= 0.5 * diff * diff / g.var[d] + 0.5 * std::log(g.var[d]);
        }
        return ll;
    }
    const auto& beta = m.multinomials[k - 1].beta;
    double ll = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l)
        if (s[l] != 0.0) ll += s[l] * std::log(beta[l]);
    return ll;
}

/// Outliers emit data uniformly: ln rho0, independent of the data vector.
inline double outlier_log_lik(const ModelBlock& m) {
    if (!(m.rho0 > 0)) throw std::invalid_argument("rho0 must be positive");
    return std::log(m.rho0);
}

/// Uniform density over the observed bounding box; degenerate dimensions
/// (no spread) contribute a unit factor.
inline double bounding_box_density(const Rows& data) {
    if (data.empty() || data.front().empty()) return 1.0;
    const std::size_t dim = data.front().size();
    double volume = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& row : data) {
            lo = std::min(lo, row[d]);
            hi = std::max(hi, row[d]);
        }
        if (hi > lo) volume *= hi - lo;
    }
    return 1.0 / volume;
}

namespace detail {

inline GaussianParams global_gaussian(const Rows& data, std::size_t dim) {
    GaussianParams g;
    g.mean.assign(dim, 0.0);
    g.var.assign(dim, 1.0);
    if (data.empty()) return g;
    for (const auto& row : data)
        for (std::size_t d = 0; d < dim; ++d) g.mean[d] += row[d];
    for (std::size_t d = 0; d < dim; ++d) g.mean[d] /= static_cast<double>(data.size());
    for (std::size_t d = 0; d < dim; ++d) {
        double acc = 0.0;
        for (const auto& row : data) {
            const double diff = row[d] - g.mean[d];
            acc += diff * diff;
        }
        g.var[d] = std::max(acc / static_cast<double>(data.size()), kVarianceFloor);
    }
    return g;
}

} // namespace detail

/// Starting block before the first M-step: family from the attribute kind,
/// all communities at the global data moments (or uniform beta), rho0 from
/// the data bounding box unless overridden.
inline ModelBlock initial_block(AttrKind kind, const Rows& data, int K, double rho0_override = 0.0) {
    ModelBlock m;
    const std::size_t dim = data.empty() ? 0 : data.front().size();
    if (kind == AttrKind::Continuous) {
        m.family = Family::Gaussian;
        m.gaussians.assign(static_cast<std::size_t>(K), detail::global_gaussian(data, dim));
    } else {
        m.family = Family::Multinomial;
        MultinomialParams uniform;
        uniform.beta.assign(dim, dim ? 1.0 / static_cast<double>(dim) : 1.0);
        m.multinomials.assign(static_cast<std::size_t>(K), uniform);
    }
    m.rho0 = rho0_override > 0 ? rho0_override : bounding_box_density(data);
    return m;
}

/// Hard-assignment M-step for Gaussian blocks: mean, then variance about the
/// new mean, floored. Communities with no members keep their previous
/// parameters; their indices (1-based) are reported through empty_out.
inline std::vector<GaussianParams> update_gaussian(const std::vector<GaussianParams>& prev,
                                                   const Rows& data,
                                                   std::span<const int> labels,
                                                   std::vector<int>* empty_out = nullptr) {
    if (data.size() != labels.size())
        throw std::invalid_argument("labels/data size mismatch");
    const int K = static_cast<int>(prev.size());
    const std::size_t dim = prev.empty() ? 0 : prev.front().mean.size();
    std::vector<GaussianParams> out = prev;
    std::vector<double> count(static_cast<std::size_t>(K), 0.0);
    std::vector<std::vector<double>> sum(static_cast<std::size_t>(K), std::vector<double>(dim, 0.0));

    for (std::size_t b = 0; b < data.size(); ++b) {
        const int k = labels[b];
        if (k < 1 || k > K) continue;
        count[k - 1] += 1.0;
        for (std::size_t d = 0; d < dim; ++d) sum[k - 1][d] += data[b][d];
    }
    for (int k = 1; k <= K; ++k) {
        if (count[k - 1] == 0.0) {
            if (empty_out) empty_out->push_back(k);
            continue;
        }
        for (std::size_t d = 0; d < dim; ++d)
            out[k - 1].mean[d] = sum[k - 1][d] / count[k - 1];
    }
    std::vector<std::vector<double>> sq(static_cast<std::size_t>(K), std::vector<double>(dim, 0.0));
    for (std::size_t b = 0; b < data.size(); ++b) {
        const int k = labels[b];
        if (k < 1 || k > K) continue;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = data[b][d] - out[k - 1].mean[d];
            sq[k - 1][d] += diff * diff;
        }
    }
    for (int k = 1; k <= K; ++k) {
        if (count[k - 1] == 0.0) continue;
        for (std::size_t d = 0; d < dim; ++d)
            out[k - 1].var[d] = std::max(sq[k - 1][d] / count[k - 1], kVarianceFloor);
    }
    return out;
}

/// Hard-assignment M-step for multinomial blocks: per-community word counts
/// with additive smoothing on every cell, then row normalization.
inline std::vector<MultinomialParams> update_multinomial(const std::vector<MultinomialParams>& prev,
                                                         const Rows& data,
                                                         std::span<const int> labels,
                                                         double smoothing = kMultinomialSmoothing,
                                                         std::vector<int>* empty_out = nullptr) {
    if (data.size() != labels.size())
        throw std::invalid_argument("labels/data size mismatch");
    const int K = static_cast<int>(prev.size());
    const std::size_t dim = prev.empty() ? 0 : prev.front().beta.size();
    std::vector<MultinomialParams> out = prev;
    std::vector<double> count(static_cast<std::size_t>(K), 0.0);
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(K), std::vector<double>(dim, 0.0));

    for (std::size_t b = 0; b < data.size(); ++b) {
        const int k = labels[b];
        if (k < 1 || k > K) continue;
        count[k - 1] += 1.0;
        for (std::size_t l = 0; l < dim; ++l) acc[k - 1][l] += data[b][l];
    }
    for (int k = 1; k <= K; ++k) {
        if (count[k - 1] == 0.0) {
            if (empty_out) empty_out->push_back(k);
            continue;
        }
        double total = 0.0;
        for (std::size_t l = 0; l < dim; ++l) total += acc[k - 1][l] + smoothing;
        if (total <= 0.0)
            throw std::invalid_argument("multinomial update needs positive smoothing or counts");
        for (std::size_t l = 0; l < dim; ++l)
            out[k - 1].beta[l] = (acc[k - 1][l] + smoothing) / total;
    }
    return out;
}

/// Sum over all active vertices of the data log-likelihood under the current
/// labels; outliers contribute ln rho0 of their block. Used to rank restarts.
/// A label vector of size |V| (CODA mode) scores node-vertices only.
inline double total_data_log_likelihood(const CommunityModel& model,
                                        const Rows& nodes,
                                        const Rows& edges,
                                        const LabelAssignment& z) {
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        total += z[i] == 0 ? outlier_log_lik(model.node_block)
                           : log_lik(model.node_block, nodes[i], z[i]);
    if (z.size() > nodes.size()) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const int k = z[nodes.size() + e];
            total += k == 0 ? outlier_log_lik(model.edge_block)
                            : log_lik(model.edge_block, edges[e], k);
        }
    }
    return total;
}

} // namespace hcoda
