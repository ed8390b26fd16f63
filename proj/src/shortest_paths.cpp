#include "mms/shortest_paths.hpp"

#include <algorithm>
#include <queue>

namespace mms {

namespace {

std::vector<int> path_of(const std::vector<int>& parent, int v) {
    std::vector<int> p;
    for (int cur = v; cur != -1; cur = parent[(std::size_t)cur]) p.push_back(cur);
    std::reverse(p.begin(), p.end());
    return p;
}

} // namespace

ShortestPathTree dijkstra(const WeightedGraph& graph, const std::vector<int>& sources) {
    const std::size_t n = graph.size();
    ShortestPathTree tree;
    tree.dist.assign(n, kInf);
    tree.parent.assign(n, -1);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<int> srcs = sources;
    std::sort(srcs.begin(), srcs.end());
    for (int s : srcs) {
        if (tree.dist[(std::size_t)s] == 0.0) continue;
        tree.dist[(std::size_t)s] = 0.0;
        heap.emplace(0.0, s);
    }

    std::vector<char> done(n, 0);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (done[(std::size_t)v]) continue;
        done[(std::size_t)v] = 1;
        for (const WeightedEdge& e : graph[(std::size_t)v]) {
            const double alt = d + e.weight;
            double& cur = tree.dist[(std::size_t)e.to];
            if (!is_finite(cur)) {
                cur = alt;
                tree.parent[(std::size_t)e.to] = v;
                heap.emplace(alt, e.to);
                continue;
            }
            const double tie = 1e-14 * (1.0 + std::abs(cur));
            if (alt < cur - tie) {
                cur = alt;
                tree.parent[(std::size_t)e.to] = v;
                heap.emplace(alt, e.to);
            } else if (std::abs(alt - cur) <= tie && !done[(std::size_t)e.to]) {
                // exact tie: keep the lexicographically smaller node sequence
                std::vector<int> alt_path = path_of(tree.parent, v);
                alt_path.push_back(e.to);
                std::vector<int> cur_path = path_of(tree.parent, e.to);
                if (alt_path < cur_path) {
                    tree.parent[(std::size_t)e.to] = v;
                    heap.emplace(alt, e.to);
                }
            }
        }
    }
    return tree;
}

std::vector<int> reconstruct_path(const ShortestPathTree& tree, int target) {
    return path_of(tree.parent, target);
}

DistMatrix floyd_warshall(const DistMatrix& weights) {
    const std::size_t n = weights.size();
    DistMatrix d = weights;
    for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_finite(d(i, k))) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_finite(d(k, j))) continue;
                const double thru = d(i, k) + d(k, j);
                if (thru < d(i, j)) d(i, j) = thru;
            }
        }
    return d;
}

} // namespace mms
