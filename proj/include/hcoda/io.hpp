// Dataset and config plumbing. Datasets are tab-separated text: a node file
// (`id<TAB>a1,a2,...`), an edge file (`src<TAB>dst<TAB>strength<TAB>b1,...`)
// and label files (`id<TAB>label`, `src<TAB>dst<TAB>label`; label 0 means
// outlier). Doubles are written with 17 significant digits so a write/load
// round trip reproduces every bit. Configs are flat JSON.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcoda/eval.hpp"

namespace hcoda {

/// Malformed input file; message carries file and 1-based line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or missing configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& file, std::size_t line,
                                    const std::string& what) {
    std::ostringstream os;
    os << file << ":" << line << ": " << what;
    throw ParseError(os.str());
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t at = 0;
    for (;;) {
        const std::size_t next = s.find(sep, at);
        if (next == std::string::npos) {
            parts.push_back(s.substr(at));
            return parts;
        }
        parts.push_back(s.substr(at, next - at));
        at = next + 1;
    }
}

inline double parse_double_field(const std::string& file, std::size_t line, const std::string& s) {
    // from_chars rather than stod: locale-independent, and subnormals parse
    // exactly instead of raising ERANGE, so every written double loads back.
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec == std::errc::result_out_of_range)
        parse_fail(file, line, "number out of range '" + s + "'");
    if (ec != std::errc()) parse_fail(file, line, "expected a number, got '" + s + "'");
    if (ptr != s.data() + s.size())
        parse_fail(file, line, "trailing characters in number '" + s + "'");
    return x;
}

inline std::int64_t parse_int_field(const std::string& file, std::size_t line, const std::string& s) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(s, &used);
        if (used != s.size()) parse_fail(file, line, "trailing characters in integer '" + s + "'");
        return x;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(file, line, "expected an integer, got '" + s + "'");
    }
}

inline std::vector<double> parse_attr_list(const std::string& file, std::size_t line,
                                           const std::string& s) {
    if (s.empty()) parse_fail(file, line, "empty attribute list");
    std::vector<double> attrs;
    for (const auto& part : split(s, ','))
        attrs.push_back(parse_double_field(file, line, part));
    return attrs;
}

inline std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");
    return in;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

inline std::string attr_list_string(const std::vector<double>& attrs) {
    std::string s;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (j) s += ',';
        s += format_double(attrs[j]);
    }
    return s;
}

} // namespace detail

inline void save_nodes(const std::string& path, const AttributedGraph& g) {
    auto out = detail::open_for_write(path);
    for (const auto& n : g.nodes)
        out << n.id << '\t' << detail::attr_list_string(n.attrs) << '\n';
}

inline void save_edges(const std::string& path, const AttributedGraph& g) {
    auto out = detail::open_for_write(path);
    for (const auto& e : g.edges)
        out << e.src << '\t' << e.dst << '\t' << format_double(e.strength) << '\t'
            << detail::attr_list_string(e.attrs) << '\n';
}

/// Parse node+edge files into a validated graph. Attribute kinds come from
/// the caller (config); any validation violation is fatal here.
inline AttributedGraph load_graph(const std::string& node_path, const std::string& edge_path,
                                  AttrKind node_kind = AttrKind::Continuous,
                                  AttrKind edge_kind = AttrKind::Continuous) {
    AttributedGraph g;
    g.node_kind = node_kind;
    g.edge_kind = edge_kind;
    {
        auto in = detail::open_for_read(node_path);
        std::string line;
        for (std::size_t ln = 1; std::getline(in, line); ++ln) {
            if (line.empty()) continue;
            const auto cols = detail::split(line, '\t');
            if (cols.size() != 2)
                detail::parse_fail(node_path, ln, "expected 2 tab-separated fields, got " +
                                                      std::to_string(cols.size()));
            g.add_node(detail::parse_int_field(node_path, ln, cols[0]),
                       detail::parse_attr_list(node_path, ln, cols[1]));
        }
    }
    {
        auto in = detail::open_for_read(edge_path);
        std::string line;
        for (std::size_t ln = 1; std::getline(in, line); ++ln) {
            if (line.empty()) continue;
            const auto cols = detail::split(line, '\t');
            if (cols.size() != 4)
                detail::parse_fail(edge_path, ln, "expected 4 tab-separated fields, got " +
                                                      std::to_string(cols.size()));
            g.add_edge(detail::parse_int_field(edge_path, ln, cols[0]),
                       detail::parse_int_field(edge_path, ln, cols[1]),
                       detail::parse_double_field(edge_path, ln, cols[2]),
                       detail::parse_attr_list(edge_path, ln, cols[3]));
        }
    }
    const ValidationReport report = validate_graph(g);
    if (!report.ok()) throw std::runtime_error("invalid graph:\n" + report.to_string());
    return g;
}

inline void save_node_labels(const std::string& path, const AttributedGraph& g,
                             std::span<const int> labels) {
    auto out = detail::open_for_write(path);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out << g.nodes[i].id << '\t' << labels[i] << '\n';
}

inline void save_edge_labels(const std::string& path, const AttributedGraph& g,
                             std::span<const int> labels) {
    auto out = detail::open_for_write(path);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        out << g.edges[e].src << '\t' << g.edges[e].dst << '\t' << labels[e] << '\n';
}

/// Node labels keyed by id; every node must be covered exactly once.
inline std::vector<int> load_node_labels(const std::string& path, const AttributedGraph& g) {
    const auto index = node_index_map(g);
    std::vector<int> labels(g.nodes.size());
    std::vector<char> seen(g.nodes.size(), 0);
    auto in = detail::open_for_read(path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
        if (line.empty()) continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 2)
            detail::parse_fail(path, ln, "expected 2 tab-separated fields, got " +
                                             std::to_string(cols.size()));
        const auto id = detail::parse_int_field(path, ln, cols[0]);
        const auto it = index.find(id);
        if (it == index.end())
            detail::parse_fail(path, ln, "unknown node id " + std::to_string(id));
        if (seen[it->second])
            detail::parse_fail(path, ln, "duplicate label for node " + std::to_string(id));
        seen[it->second] = 1;
        const auto label = detail::parse_int_field(path, ln, cols[1]);
        if (label < 0) detail::parse_fail(path, ln, "negative community label");
        labels[it->second] = static_cast<int>(label);
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (!seen[i])
            throw ParseError(path + ": no label for node " + std::to_string(g.nodes[i].id));
    return labels;
}

/// Edge labels keyed by (src, dst) after canonicalization.
inline std::vector<int> load_edge_labels(const std::string& path, const AttributedGraph& g) {
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> index;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        index[{g.edges[e].src, g.edges[e].dst}] = e;
    std::vector<int> labels(g.edges.size());
    std::vector<char> seen(g.edges.size(), 0);
    auto in = detail::open_for_read(path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
        if (line.empty()) continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 3)
            detail::parse_fail(path, ln, "expected 3 tab-separated fields, got " +
                                             std::to_string(cols.size()));
        auto src = detail::parse_int_field(path, ln, cols[0]);
        auto dst = detail::parse_int_field(path, ln, cols[1]);
        if (src > dst) std::swap(src, dst);
        const auto it = index.find({src, dst});
        if (it == index.end())
            detail::parse_fail(path, ln, "unknown edge " + std::to_string(src) + "-" +
                                             std::to_string(dst));
        if (seen[it->second])
            detail::parse_fail(path, ln, "duplicate label for edge " + std::to_string(src) +
                                             "-" + std::to_string(dst));
        seen[it->second] = 1;
        const auto label = detail::parse_int_field(path, ln, cols[2]);
        if (label < 0) detail::parse_fail(path, ln, "negative community label");
        labels[it->second] = static_cast<int>(label);
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (!seen[e])
            throw ParseError(path + ": no label for edge " + std::to_string(g.edges[e].src) +
                             "-" + std::to_string(g.edges[e].dst));
    return labels;
}

/// Write a generated dataset as nodes.tsv / edges.tsv / node_truth.tsv /
/// edge_truth.tsv under dir (created if needed).
inline void save_dataset(const std::string& dir, const SynthDataset& ds) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    save_nodes((base / "nodes.tsv").string(), ds.graph);
    save_edges((base / "edges.tsv").string(), ds.graph);
    save_node_labels((base / "node_truth.tsv").string(), ds.graph, ds.true_node_labels);
    save_edge_labels((base / "edge_truth.tsv").string(), ds.graph, ds.true_edge_labels);
}

/// Inverse of save_dataset. Outlier index sets are recovered from the zero
/// labels (generated datasets never use 0 for a planted community).
inline SynthDataset load_dataset(const std::string& dir) {
    const std::filesystem::path base(dir);
    SynthDataset ds;
    ds.graph = load_graph((base / "nodes.tsv").string(), (base / "edges.tsv").string());
    ds.true_node_labels = load_node_labels((base / "node_truth.tsv").string(), ds.graph);
    ds.true_edge_labels = load_edge_labels((base / "edge_truth.tsv").string(), ds.graph);
    for (std::size_t i = 0; i < ds.true_node_labels.size(); ++i)
        if (ds.true_node_labels[i] == 0) ds.outlier_nodes.push_back(i);
    for (std::size_t e = 0; e < ds.true_edge_labels.size(); ++e)
        if (ds.true_edge_labels[e] == 0) ds.outlier_edges.push_back(e);
    return ds;
}

/// Everything a CLI run can configure, plus the set of keys the file
/// actually provided (so subcommands can demand their required ones).
struct RunConfig {
    Hyperparams hp;
    SynthConfig synth;
    WeightScheme scheme;
    SweepConfig sweep_cfg;
    std::string node_file, edge_file;
    std::string node_truth_file, edge_truth_file;
    std::string pred_node_file, pred_edge_file;
    AttrKind node_kind = AttrKind::Continuous;
    AttrKind edge_kind = AttrKind::Continuous;
    std::set<std::string> present;

    bool has(const std::string& key) const { return present.count(key) > 0; }
    void require(const std::string& key) const {
        if (!has(key)) throw ConfigError("missing required config key '" + key + "'");
    }
};

/// Flat JSON -> RunConfig. Unknown keys and wrong value types are config
/// errors; cross-field validity (e.g. rate vs threshold) is checked by the
/// target structs at use time.
inline RunConfig parse_config(const std::string& path) {
    auto in = detail::open_for_read(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path + ": config must be a JSON object");

    RunConfig cfg;
    auto bad_type = [&](const std::string& key, const char* want) -> ConfigError {
        return ConfigError("config key '" + key + "' must be " + want);
    };
    for (const auto& [key, value] : j.items()) {
        cfg.present.insert(key);
        auto num = [&]() -> double {
            if (!value.is_number()) throw bad_type(key, "a number");
            return value.get<double>();
        };
        auto integer = [&]() -> std::int64_t {
            if (!value.is_number_integer()) throw bad_type(key, "an integer");
            return value.get<std::int64_t>();
        };
        auto boolean = [&]() -> bool {
            if (!value.is_boolean()) throw bad_type(key, "a boolean");
            return value.get<bool>();
        };
        auto str = [&]() -> std::string {
            if (!value.is_string()) throw bad_type(key, "a string");
            return value.get<std::string>();
        };

        if (key == "k") cfg.hp.k = static_cast<int>(integer());
        else if (key == "lambda1") cfg.hp.lambda1 = num();
        else if (key == "lambda2") cfg.hp.lambda2 = num();
        else if (key == "lambda3") cfg.hp.lambda3 = num();
        else if (key == "outlier_rate") cfg.hp.outlier_rate = num();
        else if (key == "outlier_threshold") {
            cfg.hp.outlier_threshold = num();
            cfg.hp.outlier_rate.reset();
        } else if (key == "psi_mode") cfg.hp.psi_mode = psi_mode_from_name(str());
        else if (key == "max_icm_sweeps") cfg.hp.max_icm_sweeps = static_cast<int>(integer());
        else if (key == "max_em_iters") cfg.hp.max_em_iters = static_cast<int>(integer());
        else if (key == "restarts") cfg.hp.restarts = static_cast<int>(integer());
        else if (key == "seed") cfg.hp.seed = static_cast<std::uint64_t>(integer());
        else if (key == "randomized_sweep") cfg.hp.randomized_sweep = boolean();
        else if (key == "debug_checks") cfg.hp.debug_checks = boolean();
        else if (key == "reseed_empty") cfg.hp.reseed_empty = boolean();
        else if (key == "rho0_node") cfg.hp.rho0_node = num();
        else if (key == "rho0_edge") cfg.hp.rho0_edge = num();
        else if (key == "node_edge_weights")
            cfg.scheme.node_edge = WeightScheme::from_name(str()).node_edge;
        else if (key == "triangle_fallback") cfg.scheme.triangle_fallback = num();
        else if (key == "n_nodes") cfg.synth.n_nodes = static_cast<std::size_t>(integer());
        else if (key == "k_true") cfg.synth.k_true = static_cast<int>(integer());
        else if (key == "node_dim") cfg.synth.node_dim = static_cast<std::size_t>(integer());
        else if (key == "edge_dim") cfg.synth.edge_dim = static_cast<std::size_t>(integer());
        else if (key == "delta") cfg.synth.delta = num();
        else if (key == "sigma_gen") cfg.synth.sigma_gen = num();
        else if (key == "p_in") cfg.synth.p_in = num();
        else if (key == "p_out") cfg.synth.p_out = num();
        else if (key == "inject_fraction") cfg.synth.inject_fraction = num();
        else if (key == "inject_edges") cfg.synth.inject_edges = boolean();
        else if (key == "swap_inject") cfg.synth.swap_inject = boolean();
        else if (key == "sweep_param") cfg.sweep_cfg.param = str();
        else if (key == "sweep_values") {
            if (!value.is_array()) throw bad_type(key, "an array of numbers");
            for (const auto& x : value) {
                if (!x.is_number()) throw bad_type(key, "an array of numbers");
                cfg.sweep_cfg.values.push_back(x.get<double>());
            }
        } else if (key == "sweep_seeds") {
            if (!value.is_array()) throw bad_type(key, "an array of integers");
            for (const auto& x : value) {
                if (!x.is_number_integer()) throw bad_type(key, "an array of integers");
                cfg.sweep_cfg.seeds.push_back(x.get<std::uint64_t>());
            }
        } else if (key == "threads") cfg.sweep_cfg.threads = static_cast<unsigned>(integer());
        else if (key == "node_file") cfg.node_file = str();
        else if (key == "edge_file") cfg.edge_file = str();
        else if (key == "node_truth") cfg.node_truth_file = str();
        else if (key == "edge_truth") cfg.edge_truth_file = str();
        else if (key == "pred_node_labels") cfg.pred_node_file = str();
        else if (key == "pred_edge_labels") cfg.pred_edge_file = str();
        else if (key == "attr_kind_node") cfg.node_kind = attr_kind_from_name(str());
        else if (key == "attr_kind_edge") cfg.edge_kind = attr_kind_from_name(str());
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

} // namespace hcoda
