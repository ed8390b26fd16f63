#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Strictly positive node weight acting as a conformal density.
struct ConformalWeight {
    std::vector<double> g;
    double min_g = 0.0;
    double max_g = 0.0;

    static ConformalWeight from(std::vector<double> values);
};

/// Infimal arc length over the adjacency; kInf across components.
DistMatrix length_distance(const DiscreteSpace& space);

/// Shortest path with trapezoid edge weights dist * (g(x)+g(y))/2.
DistMatrix conformal_distance(const DiscreteSpace& space, const ConformalWeight& g);

/// Chains with steps below eps in d_i, max-endpoint weights, capped at
/// M_g * sup d_i. Steps run over all node pairs of the thresholded complete graph.
DistMatrix chain_distance(const DiscreteSpace& space, const ConformalWeight& g,
                          const DistMatrix& d_i, double eps);

/// Largest potential gap under the per-edge constraint
/// |f(u)-f(v)| <= dist(u,v) * min(g(u),g(v)); equals min-weight shortest path.
DistMatrix dual_lipschitz_distance(const DiscreteSpace& space, const ConformalWeight& g);

} // namespace mms
