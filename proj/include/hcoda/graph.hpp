// Edge-attributed graphs and the hidden Markov random field built from them.
//
// The HMRF has one vertex per graph node (node-vertex) and one per graph
// edge (edge-vertex). Each graph edge carries a record of four clique
// weights: node-node, the two node-edge sides, and the triangle, so the
// total weight count is 4 * |E|.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hcoda {

enum class AttrKind { Continuous, Counts };

inline const char* to_string(AttrKind k) {
    return k == AttrKind::Continuous ? "continuous" : "counts";
}

inline AttrKind attr_kind_from_name(const std::string& name) {
    if (name == "continuous") return AttrKind::Continuous;
    if (name == "counts") return AttrKind::Counts;
    throw std::invalid_argument("unknown attribute kind: " + name);
}

struct NodeRecord {
    long long id = 0;
    std::vector<double> attrs;

    bool operator==(const NodeRecord&) const = default;
};

// Endpoints are node ids, stored canonically with src < dst.
struct EdgeRecord {
    long long src = 0;
    long long dst = 0;
    double strength = 1.0;
    std::vector<double> attrs;

    bool operator==(const EdgeRecord&) const = default;
};

struct AttributedGraph {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    AttrKind node_kind = AttrKind::Continuous;
    AttrKind edge_kind = AttrKind::Continuous;

    std::size_t node_dim() const { return nodes.empty() ? 0 : nodes.front().attrs.size(); }
    std::size_t edge_dim() const { return edges.empty() ? 0 : edges.front().attrs.size(); }

    void add_node(long long id, std::vector<double> attrs) {
        nodes.push_back({id, std::move(attrs)});
    }

    // Normalizes endpoint order so src < dst by node id.
    void add_edge(long long a, long long b, double strength, std::vector<double> attrs) {
        if (b < a) std::swap(a, b);
        edges.push_back({a, b, strength, std::move(attrs)});
    }

    bool operator==(const AttributedGraph&) const = default;
};

inline std::unordered_map<long long, std::size_t> node_index_map(const AttributedGraph& g) {
    std::unordered_map<long long, std::size_t> idx;
    idx.reserve(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) idx.emplace(g.nodes[i].id, i);
    return idx;
}

/// Degree of each node (number of distinct incident edges), by node position.
inline std::vector<std::size_t> node_degrees(const AttributedGraph& g) {
    auto idx = node_index_map(g);
    std::vector<std::size_t> deg(g.nodes.size(), 0);
    for (const auto& e : g.edges) {
        auto a = idx.find(e.src);
        auto b = idx.find(e.dst);
        if (a != idx.end()) ++deg[a->second];
        if (b != idx.end() && e.src != e.dst) ++deg[b->second];
    }
    return deg;
}

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        std::string out;
        for (const auto& v : violations) {
            out += v.code;
            out += ": ";
            out += v.message;
            out += '\n';
        }
        return out;
    }
};

/// Structural checks on an edge-attributed graph. Report-style: never throws.
inline ValidationReport validate_graph(const AttributedGraph& g) {
    ValidationReport rep;
    auto add = [&rep](const char* code, std::string msg) {
        rep.violations.push_back({code, std::move(msg)});
    };

    std::unordered_map<long long, std::size_t> idx;
    idx.reserve(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!idx.emplace(g.nodes[i].id, i).second)
            add("duplicate-node-id", "node id " + std::to_string(g.nodes[i].id) + " appears more than once");
    }

    const std::size_t p = g.node_dim();
    for (const auto& n : g.nodes) {
        if (n.attrs.size() != p)
            add("attribute-length", "node " + std::to_string(n.id) + " has " +
                std::to_string(n.attrs.size()) + " attributes, expected " + std::to_string(p));
        if (g.node_kind == AttrKind::Counts)
            for (double v : n.attrs)
                if (v < 0 || v != std::floor(v)) {
                    add("count-value", "node " + std::to_string(n.id) + " has a non-count attribute");
                    break;
                }
    }

    const std::size_t q = g.edge_dim();
    std::unordered_map<long long, std::unordered_map<long long, int>> seen;
    for (const auto& e : g.edges) {
        std::string name = "(" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")";
        if (e.src == e.dst) add("self-loop", "edge " + name + " is a self-loop");
        if (!idx.count(e.src))
            add("dangling-endpoint", "edge " + name + " references missing node " + std::to_string(e.src));
        if (!idx.count(e.dst))
            add("dangling-endpoint", "edge " + name + " references missing node " + std::to_string(e.dst));
        long long a = std::min(e.src, e.dst), b = std::max(e.src, e.dst);
        if (seen[a][b]++ == 1) add("duplicate-edge", "edge " + name + " appears more than once");
        if (!(e.strength > 0)) add("non-positive-strength", "edge " + name + " has strength " + std::to_string(e.strength));
        if (e.attrs.size() != q)
            add("attribute-length", "edge " + name + " has " + std::to_string(e.attrs.size()) +
                " attributes, expected " + std::to_string(q));
        if (g.edge_kind == AttrKind::Counts)
            for (double v : e.attrs)
                if (v < 0 || v != std::floor(v)) {
                    add("count-value", "edge " + name + " has a non-count attribute");
                    break;
                }
    }
    return rep;
}

/// Co-occurrence statistics for one edge: how often the endpoints appear
/// together vs. in total (e.g. shared papers vs. union of papers).
struct PairStats {
    double shared = 0;
    double unioned = 0;
};

/// Per-edge triangle weights, shared/union. When stats are absent every
/// triangle gets the constant fallback weight.
inline std::vector<double> cooccurrence_triangle_weights(const AttributedGraph& g,
                                                         const std::vector<PairStats>* stats,
                                                         double fallback = 1.0) {
    std::vector<double> w(g.edges.size(), fallback);
    if (!stats) return w;
    if (stats->size() != g.edges.size())
        throw std::invalid_argument("pair stats size does not match edge count");
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& s = (*stats)[e];
        if (s.shared < 0 || s.unioned < s.shared)
            throw std::invalid_argument("pair stats require 0 <= shared <= union");
        if (s.unioned < 1)
            throw std::invalid_argument("pair stats require union >= 1 for an existing edge");
        w[e] = s.shared / s.unioned;
    }
    return w;
}

/// W_{v_i e_ij} = 1 / degree(v_i), returned per edge as (src side, dst side).
inline std::vector<std::pair<double, double>> inverse_degree_node_edge_weights(const AttributedGraph& g) {
    auto idx = node_index_map(g);
    auto deg = node_degrees(g);
    std::vector<std::pair<double, double>> w;
    w.reserve(g.edges.size());
    for (const auto& e : g.edges)
        w.emplace_back(1.0 / static_cast<double>(deg[idx.at(e.src)]),
                       1.0 / static_cast<double>(deg[idx.at(e.dst)]));
    return w;
}

struct WeightScheme {
    enum class NodeEdge { InverseDegree, Unit };

    NodeEdge node_edge = NodeEdge::InverseDegree;
    // Optional per-edge co-occurrence stats for triangle weights, aligned
    // with the graph's edge list; absent means constant fallback.
    std::optional<std::vector<PairStats>> pair_stats;
    double triangle_fallback = 1.0;

    static WeightScheme from_name(const std::string& name) {
        WeightScheme s;
        if (name == "inverse-degree") s.node_edge = NodeEdge::InverseDegree;
        else if (name == "unit") s.node_edge = NodeEdge::Unit;
        else throw std::invalid_argument("unknown weight scheme: " + name);
        return s;
    }
};

// One graph edge's clique record: endpoints as node indices plus the four
// weights (node-node, both node-edge sides, triangle).
struct EdgeClique {
    std::size_t i = 0;
    std::size_t j = 0;
    double w_node_node = 1.0;
    double w_i_edge = 1.0;
    double w_j_edge = 1.0;
    double w_triangle = 1.0;
};

struct IncidentEdge {
    std::size_t edge = 0;   // index into Hmrf::cliques
    std::size_t other = 0;  // node index of the opposite endpoint
};

struct Hmrf {
    std::size_t n_nodes = 0;
    std::vector<EdgeClique> cliques;
    std::vector<std::vector<IncidentEdge>> adjacency;  // per node index

    std::size_t n_edges() const { return cliques.size(); }
    std::size_t n_vertices() const { return n_nodes + cliques.size(); }
    std::size_t weight_count() const { return 4 * cliques.size(); }

    bool is_node_vertex(std::size_t b) const { return b < n_nodes; }
    std::size_t edge_of(std::size_t b) const { return b - n_nodes; }
    std::size_t vertex_of_edge(std::size_t e) const { return n_nodes + e; }

    /// Node-edge weight on the given node's side of a clique.
    double side_weight(const EdgeClique& c, std::size_t node) const {
        return node == c.i ? c.w_i_edge : c.w_j_edge;
    }
};

///// Builds the HMRF for a validated graph: |B| = |V| + |E| vertices,
/// node-vertices first (input order), then edge-vertices (input order).
inline Hmrf build_hmrf(const AttributedGraph& g, const WeightScheme& scheme = {}) {
    Hmrf h;
    h.n_nodes = g.nodes.size();
    h.adjacency.resize(g.nodes.size());
    if (g.edges.empty()) return h;

    auto idx = node_index_map(g);
    auto tri = cooccurrence_triangle_weights(
        g, scheme.pair_stats ? &*scheme.pair_stats : nullptr, scheme.triangle_fallback);
    std::vector<std::pair<double, double>> node_edge;
    if (scheme.node_edge == WeightScheme::NodeEdge::InverseDegree)
        node_edge = inverse_degree_node_edge_weights(g);
    else
        node_edge.assign(g.edges.size(), {1.0, 1.0});

    h.cliques.reserve(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& rec = g.edges[e];
        EdgeClique c;
        c.i = idx.at(rec.src);
        c.j = idx.at(rec.dst);
        c.w_node_node = rec.strength;
        c.w_i_edge = node_edge[e].first;
        c.w_j_edge = node_edge[e].second;
        c.w_triangle = tri[e];
        h.cliques.push_back(c);
        h.adjacency[c.i].push_back({e, c.j});
        h.adjacency[c.j].push_back({e, c.i});
    }
    return h;
}

/// Z over the HMRF vertex set; 0 marks the outlier community. In CODA mode
/// the assignment covers node-vertices only (size |V| instead of |B|).
using LabelAssignment = std::vector<int>;

/// Neighborhood of a node-vertex under the current labels: empty for an
/// outlier; otherwise the linked node-vertices and incident edge-vertices
/// whose own labels are nonzero. Sorted by vertex index.
inline std::vector<std::size_t> neighbors_node(const Hmrf& h, std::size_t i, const LabelAssignment& z) {
    std::vector<std::size_t> out;
    if (z[i] == 0) return out;
    const bool edges_active = z.size() > h.n_nodes;
    for (const auto& inc : h.adjacency[i]) {
        if (z[inc.other] != 0) out.push_back(inc.other);
        if (edges_active && z[h.n_nodes + inc.edge] != 0) out.push_back(h.n_nodes + inc.edge);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Neighborhood of an edge-vertex: its endpoints, minus outliers; empty if
/// the edge-vertex itself is an outlier.
inline std::vector<std::size_t> neighbors_edge(const Hmrf& h, std::size_t b, const LabelAssignment& z) {
    std::vector<std::size_t> out;
    if (z[b] == 0) return out;
    const auto& c = h.cliques[h.edge_of(b)];
    if (z[c.i] != 0) out.push_back(c.i);
    if (z[c.j] != 0) out.push_back(c.j);
    return out;
}

} // namespace hcoda
