#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

struct WeightedEdge {
    int to;
    double weight;
};

using WeightedGraph = std::vector<std::vector<WeightedEdge>>; // per-node sorted by `to`

struct ShortestPathTree {
    std::vector<double> dist;   // kInf where unreachable
    std::vector<int> parent;    // -1 at sources / unreachable
};

/// Dijkstra from a set of sources. Ties are broken toward the
/// lexicographically smallest node sequence, so runs are reproducible.
ShortestPathTree dijkstra(const WeightedGraph& graph, const std::vector<int>& sources);

std::vector<int> reconstruct_path(const ShortestPathTree& tree, int target);

/// All-pairs shortest paths over an arbitrary weight matrix (kInf = no step).
DistMatrix floyd_warshall(const DistMatrix& weights);

} // namespace mms
