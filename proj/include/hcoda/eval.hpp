// Scoring and batch evaluation: outlier-detection precision, community
// assignment accuracy under the best label bijection, CSV reports with a
// fixed header, and single-parameter sweeps over seeded synthetic runs.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hcoda/em.hpp"
#include "hcoda/synthgen.hpp"

namespace hcoda {

/// Precision of the extracted set: |pred ∩ truth| / |pred|. An empty
/// extraction scores 1 exactly when there was nothing to find. Inputs are
/// ascending index lists.
inline double od_accuracy(const std::vector<std::size_t>& predicted,
                          const std::vector<std::size_t>& truth) {
    if (predicted.empty()) return truth.empty() ? 1.0 : 0.0;
    std::size_t hits = 0;
    auto t = truth.begin();
    for (std::size_t p : predicted) {
        while (t != truth.end() && *t < p) ++t;
        if (t != truth.end() && *t == p) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

/// Community-assignment accuracy over the vertices whose TRUE label is
/// nonzero: the best bijection between predicted and true community ids is
/// found by optimal assignment on the confusion matrix, and a predicted 0
/// (outlier) on a true community member always counts as a miss. Vectors
/// must have equal length; returns 1 when no vertex has a true community.
inline double ca_accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("ca_accuracy: label vectors differ in length");
    int k_pred = 0, k_true = 0;
    std::size_t eligible = 0;
    for (std::size_t b = 0; b < truth.size(); ++b) {
        if (truth[b] == 0) continue;
        ++eligible;
        k_true = std::max(k_true, truth[b]);
        k_pred = std::max(k_pred, predicted[b]);
    }
    if (eligible == 0) return 1.0;
    const int n = std::max({k_pred, k_true, 1});
    std::vector<std::vector<double>> confusion(n, std::vector<double>(n, 0.0));
    for (std::size_t b = 0; b < truth.size(); ++b) {
        if (truth[b] == 0 || predicted[b] == 0) continue;
        confusion[predicted[b] - 1][truth[b] - 1] += 1.0;
    }
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost[i][j] = -confusion[i][j];
    const auto assign = detail::min_cost_assignment(cost);
    double matched = 0.0;
    for (int i = 0; i < n; ++i) matched += confusion[i][assign[i]];
    return matched / static_cast<double>(eligible);
}

inline constexpr const char* kReportHeader = "param,seed,od_acc_node,od_acc_edge,ca_acc,runtime_ms";

struct EvalReport {
    std::string param = "-";  // swept-parameter value, "-" outside sweeps
    std::uint64_t seed = 0;
    std::optional<double> od_acc_node;
    std::optional<double> od_acc_edge;
    std::optional<double> ca_acc;
    double runtime_ms = 0.0;
    std::string config_echo;  // flat key=value echo, written as a side artifact

    void validate() const {
        for (const auto& a : {od_acc_node, od_acc_edge, ca_acc})
            if (a && !(*a >= 0.0 && *a <= 1.0))
                throw std::logic_error("report: accuracy outside [0,1]");
        if (!(runtime_ms > 0.0)) throw std::logic_error("report: runtime must be positive");
    }

    std::string csv_row() const {
        auto cell = [](const std::optional<double>& x) {
            return x ? format_fixed(*x, 6) : std::string("-");
        };
        std::ostringstream os;
        os << param << ',' << seed << ',' << cell(od_acc_node) << ',' << cell(od_acc_edge)
           << ',' << cell(ca_acc) << ',' << format_fixed(runtime_ms, 3);
        return os.str();
    }
};

/// Score one fit against generator ground truth. Edge OD is only reported
/// when the dataset actually has injected edge outliers recorded and the fit
/// produced edge labels (not CODA).
inline EvalReport score_fit(const FitResult& fr, const SynthDataset& ds, bool coda,
                            double runtime_ms, std::uint64_t seed) {
    EvalReport rep;
    rep.seed = seed;
    rep.runtime_ms = runtime_ms;
    rep.od_acc_node = od_accuracy(fr.node_outliers, ds.outlier_nodes);
    if (!coda && !ds.outlier_edges.empty())
        rep.od_acc_edge = od_accuracy(fr.edge_outliers, ds.outlier_edges);
    rep.ca_acc = ca_accuracy(
        std::span<const int>(fr.labels.data(), ds.graph.nodes.size()),
        std::span<const int>(ds.true_node_labels.data(), ds.true_node_labels.size()));
    return rep;
}

struct SweepConfig {
    std::string param;             // lambda1 | lambda2 | lambda3 | rate | k
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    unsigned threads = 4;

    void validate() const {
        if (values.empty()) throw std::invalid_argument("sweep: empty value grid");
        if (seeds.empty()) throw std::invalid_argument("sweep: empty seed list");
        if (threads == 0) throw std::invalid_argument("sweep: need at least one worker");
    }
};

inline void apply_sweep_param(Hyperparams& hp, const std::string& name, double value) {
    if (name == "lambda1") hp.lambda1 = value;
    else if (name == "lambda2") hp.lambda2 = value;
    else if (name == "lambda3") hp.lambda3 = value;
    else if (name == "rate") hp.outlier_rate = value;
    else if (name == "k") hp.k = static_cast<int>(value);
    else throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
}

struct SweepResult {
    std::vector<EvalReport> runs;  // value-major, seed-minor order

    /// Per-value means in grid order; the seed column reads "mean".
    std::string to_csv(const SweepConfig& sw) const {
        std::ostringstream os;
        os << kReportHeader << '\n';
        for (const auto& r : runs) os << r.csv_row() << '\n';
        const std::size_t per_value = sw.seeds.size();
        for (std::size_t v = 0; v < sw.values.size(); ++v) {
            const auto* block = runs.data() + v * per_value;
            auto mean_of = [&](auto getter) -> std::optional<double> {
                double sum = 0.0;
                for (std::size_t s = 0; s < per_value; ++s) {
                    const auto& x = getter(block[s]);
                    if (!x) return std::nullopt;
                    sum += *x;
                }
                return sum / static_cast<double>(per_value);
            };
            auto cell = [](const std::optional<double>& x) {
                return x ? format_fixed(*x, 6) : std::string("-");
            };
            double rt = 0.0;
            for (std::size_t s = 0; s < per_value; ++s) rt += block[s].runtime_ms;
            rt /= static_cast<double>(per_value);
            os << format_double(sw.values[v]) << ",mean,"
               << cell(mean_of([](const EvalReport& r) { return r.od_acc_node; })) << ','
               << cell(mean_of([](const EvalReport& r) { return r.od_acc_edge; })) << ','
               << cell(mean_of([](const EvalReport& r) { return r.ca_acc; })) << ','
               << format_fixed(rt, 3) << '\n';
        }
        return os.str();
    }
};

/// One full pipeline run: generate -> build -> fit (with restarts) -> score.
inline EvalReport run_synthetic_fit(const SynthConfig& scfg, const Hyperparams& hp,
                                    std::uint64_t seed, const WeightScheme& scheme = {}) {
    const SynthDataset ds = make_dataset(scfg, seed);
    const Hmrf h = build_hmrf(ds.graph, scheme);
    Hyperparams run_hp = hp;
    const auto t0 = std::chrono::steady_clock::now();
    const FitResult fr = fit_with_restarts(h, ds.graph, run_hp, run_hp.restarts, seed);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::max(
        std::chrono::duration<double, std::milli>(t1 - t0).count(), 1e-3);
    return score_fit(fr, ds, run_hp.coda, ms, seed);
}

/// Grid runs over one hyperparameter: every (value, seed) pair is an
/// independent job on a bounded worker pool; rows land in a pre-sized slot
/// per job, so the output order never depends on scheduling.
inline SweepResult sweep(const SynthConfig& scfg, const Hyperparams& base_hp,
                         const SweepConfig& sw, const WeightScheme& scheme = {}) {
    sw.validate();
    {
        Hyperparams probe = base_hp;  // reject unknown names before spawning workers
        apply_sweep_param(probe, sw.param, sw.values.front());
    }
    struct Job {
        std::size_t slot;
        double value;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < sw.values.size(); ++v)
        for (std::size_t s = 0; s < sw.seeds.size(); ++s)
            jobs.push_back({v * sw.seeds.size() + s, sw.values[v], sw.seeds[s]});

    SweepResult result;
    result.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t at = next.fetch_add(1);
            if (at >= jobs.size()) return;
            const Job& job = jobs[at];
            Hyperparams hp = base_hp;
            apply_sweep_param(hp, sw.param, job.value);
            EvalReport rep = run_synthetic_fit(scfg, hp, job.seed, scheme);
            rep.param = format_double(job.value);
            result.runs[job.slot] = std::move(rep);
        }
    };
    const unsigned n_workers =
        std::min<unsigned>(sw.threads, static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return result;
}

} // namespace hcoda
