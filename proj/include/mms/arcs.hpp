#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Finite node path with per-edge lengths taken from the ambient space.
/// A single node is the constant arc (length 0).
class Arc {
public:
    Arc(std::vector<int> nodes, const DiscreteSpace& space);

    const std::vector<int>& nodes() const { return nodes_; }
    const std::vector<double>& edge_lengths() const { return edge_lengths_; }
    double length() const { return length_; }
    bool constant() const { return nodes_.size() == 1; }
    int first() const { return nodes_.front(); }
    int last() const { return nodes_.back(); }

    /// Cumulative variation V_0 = 0, ..., V_k = length.
    std::vector<double> cumulative_variation() const;

    bool operator==(const Arc& other) const { return nodes_ == other.nodes_; }
    bool operator<(const Arc& other) const { return nodes_ < other.nodes_; }

private:
    std::vector<int> nodes_;
    std::vector<double> edge_lengths_;
    double length_ = 0.0;
};

/// Node weights of the arc measure: each edge (x,y) puts dist(x,y)/2 on both endpoints.
/// Total mass equals the arc length.
std::vector<double> arc_measure(const Arc& arc, std::size_t n_nodes);

double line_integral(const std::vector<double>& f, const Arc& arc);

/// Canonical representative: stationary steps removed, lexicographically
/// smaller endpoint first. Idempotent.
Arc normalize(const Arc& arc, const DiscreteSpace& space);

/// Sub-arc between arc-length fractions s < t, snapped to the nearest
/// cumulative-variation breakpoints.
Arc restrict(const Arc& arc, double s, double t, const DiscreteSpace& space);

struct Connector {
    std::vector<int> source;
    std::vector<int> target;
    int max_edges = 1;
};

/// Explicit arc list or a connector generator; enumeration is cached by value.
class PathFamily {
public:
    static PathFamily explicit_family(std::vector<Arc> arcs);
    static PathFamily connector(std::vector<int> source, std::vector<int> target, int max_edges);

    bool is_connector() const { return is_connector_; }
    const Connector& connector_spec() const { return connector_; }
    const std::vector<Arc>& explicit_arcs() const { return arcs_; }

private:
    PathFamily() = default;
    bool is_connector_ = false;
    Connector connector_;
    std::vector<Arc> arcs_;
};

constexpr int kConnectorMaxEdgesGuard = 12;
constexpr std::size_t kFamilySizeCap = 1000000;

/// Deterministic, duplicate-free enumeration (lexicographic on node sequences).
/// Connector families yield all simple paths between the sets with <= maxEdges edges.
std::vector<Arc> enumerate_family(const PathFamily& family, const DiscreteSpace& space);

/// Simple paths from `source` to any target with at most max_edges edges over the
/// adjacency, without the connector depth guard. Used by family enumeration and
/// by the plan solvers.
std::vector<Arc> simple_paths(const DiscreteSpace& space, const std::vector<int>& source,
                              const std::vector<int>& target, int max_edges,
                              std::size_t cap = kFamilySizeCap);

} // namespace mms
