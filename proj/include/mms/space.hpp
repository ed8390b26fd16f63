#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mms/errors.hpp"

namespace mms {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

/// Square matrix of extended reals stored row-major; kInf encodes an absent entry.
class DistMatrix {
public:
    DistMatrix() = default;
    explicit DistMatrix(std::size_t n, double fill = kInf) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    double max_finite() const {
        double m = 0.0;
        for (double v : data_)
            if (is_finite(v) && v > m) m = v;
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Violation {
    enum class Kind { Symmetry, Diagonal, Positivity, Triangle, Measure };
    Kind kind;
    int i = -1, j = -1, k = -1;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool triangle_sampled = false;   // true when n > 500 and only random triples were checked
    bool valid() const { return violations.empty(); }
};

/// Finite extended metric-measure space: nodes, symmetric extended distance,
/// strictly positive node measure. Immutable after construction.
class DiscreteSpace {
public:
    /// Builds from a full distance matrix; adjacency is every finite off-diagonal pair.
    static DiscreteSpace from_matrix(std::vector<std::string> nodes, DistMatrix dist,
                                     std::vector<double> measure);

    /// Builds from weighted edges; dist is the induced shortest-path metric and
    /// adjacency is the given edge list.
    static DiscreteSpace from_graph(std::vector<std::string> nodes,
                                    const std::vector<std::tuple<int, int, double>>& edges,
                                    std::vector<double> measure);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const DistMatrix& dist() const { return dist_; }
    double dist(int i, int j) const { return dist_(i, j); }
    const std::vector<double>& measure() const { return measure_; }
    double measure(int i) const { return measure_[i]; }
    double total_mass() const;

    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

    int index_of(const std::string& name) const;

    /// Largest finite distance entry (0 on a one-node space).
    double max_finite_dist() const { return dist_.max_finite(); }

    bool connected() const;

private:
    DiscreteSpace() = default;
    void build_adjacency_from_edges(const std::vector<std::pair<int, int>>& edges);

    std::vector<std::string> nodes_;
    DistMatrix dist_;
    std::vector<double> measure_;
    std::vector<std::pair<int, int>> edges_;     // i < j
    std::vector<std::vector<int>> neighbors_;
};

/// Report-style check of the space invariants. Constructors call this and
/// reject invalid data; it is exposed for diagnostics on raw matrices too.
ValidationReport validate(const DiscreteSpace& space);
ValidationReport validate_raw(const DistMatrix& dist, const std::vector<double>& measure,
                              std::uint64_t triangle_sample_seed = 0);

/// Ordered list of finite semidistance matrices d_0 <= d_1 <= ... <= dist.
class SemidistanceFamily {
public:
    explicit SemidistanceFamily(std::vector<DistMatrix> members);

    std::size_t size() const { return members_.size(); }
    const DistMatrix& member(std::size_t i) const { return members_[i]; }
    const DistMatrix& last() const { return members_.back(); }

private:
    std::vector<DistMatrix> members_;
};

/// Canonical monotone family d_i = min(dist, thresholds[i]).
SemidistanceFamily truncated_family(const DiscreteSpace& space,
                                    const std::vector<double>& thresholds);

} // namespace mms
