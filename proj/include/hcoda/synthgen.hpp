// Planted-community benchmark generator. Nodes split into K_true equal
// communities with Gaussian attributes spaced delta apart; edges follow a
// planted partition (p_in within, p_out across); edge attributes come from
// the edge's community. Outlier injection replaces attribute vectors only —
// topology is never touched.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hcoda/likelihood.hpp"
#include "hcoda/util.hpp"

namespace hcoda {

struct SynthConfig {
    std::size_t n_nodes = 1000;
    int k_true = 5;
    std::size_t node_dim = 1;  // p
    std::size_t edge_dim = 1;  // q
    double delta = 5.0;        // community mean spacing: mu_k = k * delta
    double sigma_gen = 1.0;
    double p_in = 0.01;
    double p_out = 0.001;
    double inject_fraction = 0.0;  // f; 0 disables injection
    bool inject_edges = false;     // also perturb round(f*|E|) edge vectors
    bool swap_inject = false;      // draw from the farthest community instead of the box

    void validate() const {
        if (n_nodes == 0) throw std::invalid_argument("synth: n_nodes must be positive");
        if (k_true < 1) throw std::invalid_argument("synth: k_true must be >= 1");
        if (node_dim == 0 || edge_dim == 0)
            throw std::invalid_argument("synth: attribute dimensions must be positive");
        if (sigma_gen <= 0.0) throw std::invalid_argument("synth: sigma_gen must be positive");
        if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
            throw std::invalid_argument("synth: need 0 <= p_out <= p_in <= 1");
        if (!(inject_fraction >= 0.0 && inject_fraction < 1.0))
            throw std::invalid_argument("synth: inject_fraction must lie in [0, 1)");
    }

    /// Named sizes from the experimental protocol. Edge probabilities scale
    /// as 1/|V| so the expected degree stays constant across presets.
    static SynthConfig preset(const std::string& name) {
        SynthConfig cfg;
        std::size_t n = 0;
        if (name == "graphA") n = 1000;
        else if (name == "graphB") n = 10000;
        else if (name == "graphC") n = 100000;
        else throw std::invalid_argument("synth: unknown preset '" + name + "'");
        cfg.n_nodes = n;
        const double scale = 1000.0 / static_cast<double>(n);
        cfg.p_in = 0.01 * scale;
        cfg.p_out = 0.001 * scale;
        return cfg;
    }
};

struct SynthDataset {
    AttributedGraph graph;
    std::vector<int> true_node_labels;        // 0 marks injected outliers
    std::vector<int> true_edge_labels;        // aligned with graph.edges
    std::vector<std::size_t> outlier_nodes;   // injected node indices, ascending
    std::vector<std::size_t> outlier_edges;   // injected edge indices, ascending

    bool operator==(const SynthDataset& o) const {
        return graph.nodes == o.graph.nodes && graph.edges == o.graph.edges &&
               true_node_labels == o.true_node_labels &&
               true_edge_labels == o.true_edge_labels &&
               outlier_nodes == o.outlier_nodes && outlier_edges == o.outlier_edges;
    }
};

namespace detail {

/// Contiguous community blocks: first (n mod K) blocks get one extra member.
inline std::vector<std::pair<std::size_t, std::size_t>> community_blocks(std::size_t n, int K) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    const std::size_t base = n / static_cast<std::size_t>(K);
    std::size_t extra = n % static_cast<std::size_t>(K);
    std::size_t at = 0;
    for (int k = 0; k < K; ++k) {
        std::size_t len = base + (extra > 0 ? 1 : 0);
        if (extra > 0) --extra;
        blocks.emplace_back(at, at + len);
        at += len;
    }
    return blocks;
}

/// Draw `count` distinct node pairs from one community-pair block. Same-block
/// pairs are unordered within [lo,hi); cross-block pairs take one endpoint
/// from each side. Enumerates when the request is a large share of the block,
/// otherwise rejection-samples (cheap in the sparse regime).
inline std::vector<std::pair<std::size_t, std::size_t>> sample_block_pairs(
    std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi,
    std::uint64_t total_pairs, std::uint64_t count, std::mt19937_64& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (count == 0) return out;
    const bool same = (a_lo == b_lo);
    if (2 * count > total_pairs && total_pairs <= 10000000ULL) {
        std::vector<std::pair<std::size_t, std::size_t>> all;
        all.reserve(total_pairs);
        if (same) {
            for (std::size_t u = a_lo; u < a_hi; ++u)
                for (std::size_t v = u + 1; v < a_hi; ++v) all.emplace_back(u, v);
        } else {
            for (std::size_t u = a_lo; u < a_hi; ++u)
                for (std::size_t v = b_lo; v < b_hi; ++v) all.emplace_back(u, v);
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
            std::swap(all[i], all[pick(rng)]);
        }
        all.resize(count);
        std::sort(all.begin(), all.end());
        return all;
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::uniform_int_distribution<std::size_t> pick_a(a_lo, a_hi - 1);
    std::uniform_int_distribution<std::size_t> pick_b(b_lo, b_hi - 1);
    while (seen.size() < count) {
        std::size_t u = pick_a(rng);
        std::size_t v = same ? pick_a(rng) : pick_b(rng);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        seen.emplace(u, v);
    }
    out.assign(seen.begin(), seen.end());
    return out;
}

/// Per-dimension [lo, hi] over a set of attribute rows.
inline std::pair<std::vector<double>, std::vector<double>> attribute_bounds(const Rows& rows) {
    if (rows.empty()) return {};
    const std::size_t dim = rows.front().size();
    std::vector<double> lo(rows.front().begin(), rows.front().end());
    std::vector<double> hi = lo;
    for (const auto& row : rows)
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], row[j]);
            hi[j] = std::max(hi[j], row[j]);
        }
    return {lo, hi};
}

/// Pick m distinct indices from [0, n) by partial Fisher-Yates; ascending.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    m = std::min(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace detail

/// Build the clean planted dataset (no injection). Deterministic in seed.
inline SynthDataset generate(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SynthDataset ds;
    ds.graph.node_kind = AttrKind::Continuous;
    ds.graph.edge_kind = AttrKind::Continuous;

    const auto blocks = detail::community_blocks(cfg.n_nodes, cfg.k_true);
    ds.true_node_labels.resize(cfg.n_nodes);
    for (int k = 1; k <= cfg.k_true; ++k)
        for (std::size_t i = blocks[k - 1].first; i < blocks[k - 1].second; ++i)
            ds.true_node_labels[i] = k;

    std::mt19937_64 attr_rng(mix_seed(seed, 10));
    std::normal_distribution<double> noise(0.0, cfg.sigma_gen);
    ds.graph.nodes.reserve(cfg.n_nodes);
    for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
        const double mu = static_cast<double>(ds.true_node_labels[i]) * cfg.delta;
        std::vector<double> attrs(cfg.node_dim);
        for (auto& a : attrs) a = mu + noise(attr_rng);
        ds.graph.add_node(static_cast<std::int64_t>(i), std::move(attrs));
    }

    std::mt19937_64 topo_rng(mix_seed(seed, 11));
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, int>> edges;  // (pair, community)
    for (int a = 1; a <= cfg.k_true; ++a) {
        for (int b = a; b <= cfg.k_true; ++b) {
            const auto [a_lo, a_hi] = blocks[a - 1];
            const auto [b_lo, b_hi] = blocks[b - 1];
            const std::uint64_t na = a_hi - a_lo, nb = b_hi - b_lo;
            const std::uint64_t total = (a == b) ? na * (na - 1) / 2 : na * nb;
            if (total == 0) continue;
            const double p = (a == b) ? cfg.p_in : cfg.p_out;
            std::binomial_distribution<std::uint64_t> n_edges_dist(total, p);
            const std::uint64_t m = n_edges_dist(topo_rng);
            auto pairs = detail::sample_block_pairs(a_lo, a_hi, b_lo, b_hi, total, m, topo_rng);
            std::uniform_int_distribution<int> side(0, 1);
            for (const auto& pr : pairs) {
                const int community = (a == b) ? a : (side(topo_rng) == 0 ? a : b);
                edges.emplace_back(pr, community);
            }
        }
    }
    std::sort(edges.begin(), edges.end());

    std::mt19937_64 edge_attr_rng(mix_seed(seed, 12));
    ds.graph.edges.reserve(edges.size());
    ds.true_edge_labels.reserve(edges.size());
    for (const auto& [pr, community] : edges) {
        const double mu = static_cast<double>(community) * cfg.delta;
        std::vector<double> attrs(cfg.edge_dim);
        for (auto& b : attrs) b = mu + noise(edge_attr_rng);
        ds.graph.add_edge(static_cast<std::int64_t>(pr.first),
                          static_cast<std::int64_t>(pr.second), 1.0, std::move(attrs));
        ds.true_edge_labels.push_back(community);
    }
    return ds;
}

/// Replace the attribute vectors of round(f*|V|) uniformly chosen nodes and
/// mark them as true outliers. Default recipe: uniform draw over the global
/// attribute bounding box widened by 50% (25% on each side). The swap recipe
/// instead draws from the planted community farthest from the node's own.
inline SynthDataset inject_outliers(SynthDataset ds, const SynthConfig& cfg, double f,
                                    std::uint64_t seed) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("inject: fraction must lie in (0, 1)");
    const auto m = static_cast<std::size_t>(std::llround(f * static_cast<double>(ds.graph.nodes.size())));
    if (m >= ds.graph.nodes.size())
        throw std::invalid_argument("inject: fraction selects the whole node set");

    std::mt19937_64 pick_rng(mix_seed(seed, 20));
    auto chosen = detail::sample_indices(ds.graph.nodes.size(), m, pick_rng);

    std::mt19937_64 draw_rng(mix_seed(seed, 21));
    if (cfg.swap_inject) {
        std::normal_distribution<double> noise(0.0, cfg.sigma_gen);
        for (std::size_t i : chosen) {
            const int own = ds.true_node_labels[i];
            const int far = (own <= (cfg.k_true + 1) / 2) ? cfg.k_true : 1;
            const double mu = static_cast<double>(far) * cfg.delta;
            for (auto& a : ds.graph.nodes[i].attrs) a = mu + noise(draw_rng);
        }
    } else {
        const auto [lo, hi] = detail::attribute_bounds(node_rows(ds.graph));
        for (std::size_t i : chosen) {
            for (std::size_t j = 0; j < ds.graph.nodes[i].attrs.size(); ++j) {
                const double w = hi[j] - lo[j];
                std::uniform_real_distribution<double> box(lo[j] - 0.25 * w, hi[j] + 0.25 * w);
                ds.graph.nodes[i].attrs[j] = box(draw_rng);
            }
        }
    }
    for (std::size_t i : chosen) ds.true_node_labels[i] = 0;
    ds.outlier_nodes = std::move(chosen);
    return ds;
}

/// Same replacement recipe for round(f*|E|) edge attribute vectors (always
/// the bounding-box draw; the swap recipe is node-only).
inline SynthDataset inject_edge_outliers(SynthDataset ds, double f, std::uint64_t seed) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("inject: fraction must lie in (0, 1)");
    if (ds.graph.edges.empty()) return ds;
    const auto m = static_cast<std::size_t>(std::llround(f * static_cast<double>(ds.graph.edges.size())));
    if (m == 0) return ds;

    std::mt19937_64 pick_rng(mix_seed(seed, 22));
    auto chosen = detail::sample_indices(ds.graph.edges.size(), m, pick_rng);

    std::mt19937_64 draw_rng(mix_seed(seed, 23));
    const auto [lo, hi] = detail::attribute_bounds(edge_rows(ds.graph));
    for (std::size_t e : chosen) {
        for (std::size_t j = 0; j < ds.graph.edges[e].attrs.size(); ++j) {
            const double w = hi[j] - lo[j];
            std::uniform_real_distribution<double> box(lo[j] - 0.25 * w, hi[j] + 0.25 * w);
            ds.graph.edges[e].attrs[j] = box(draw_rng);
        }
    }
    for (std::size_t e : chosen) ds.true_edge_labels[e] = 0;
    ds.outlier_edges = std::move(chosen);
    return ds;
}

/// Generate plus any injection the config asks for. The entry point used by
/// the CLI and the benchmark harness.
inline SynthDataset make_dataset(const SynthConfig& cfg, std::uint64_t seed) {
    SynthDataset ds = generate(cfg, seed);
    if (cfg.inject_fraction > 0.0) {
        ds = inject_outliers(std::move(ds), cfg, cfg.inject_fraction, seed);
        if (cfg.inject_edges)
            ds = inject_edge_outliers(std::move(ds), cfg.inject_fraction, seed);
    }
    return ds;
}

} // namespace hcoda
