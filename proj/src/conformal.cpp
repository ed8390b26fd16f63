#include "mms/conformal.hpp"

#include <algorithm>
#include <functional>

#include "mms/shortest_paths.hpp"

namespace mms {

ConformalWeight ConformalWeight::from(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::BadInput, "empty conformal weight");
    ConformalWeight w;
    w.min_g = kInf;
    w.max_g = 0.0;
    for (double v : values) {
        if (!(v > 0.0) || !is_finite(v))
            throw Error(ErrorCode::BadInput, "conformal weight must be strictly positive and finite");
        w.min_g = std::min(w.min_g, v);
        w.max_g = std::max(w.max_g, v);
    }
    w.g = std::move(values);
    return w;
}

namespace {

DistMatrix edge_weight_apsp(const DiscreteSpace& space,
                            const std::function<double(int, int, double)>& weight) {
    const std::size_t n = space.size();
    DistMatrix w(n);
    for (std::size_t i = 0; i < n; ++i) w(i, i) = 0.0;
    for (auto [a, b] : space.edges()) {
        const double d = space.dist(a, b);
        const double val = weight(a, b, d);
        w((std::size_t)a, (std::size_t)b) = val;
        w((std::size_t)b, (std::size_t)a) = val;
    }
    return floyd_warshall(w);
}

} // namespace

DistMatrix length_distance(const DiscreteSpace& space) {
    return edge_weight_apsp(space, [](int, int, double d) { return d; });
}

DistMatrix conformal_distance(const DiscreteSpace& space, const ConformalWeight& g) {
    if (g.g.size() != space.size()) throw Error(ErrorCode::BadInput, "weight size mismatch");
    return edge_weight_apsp(space, [&](int a, int b, double d) {
        return d * (g.g[(std::size_t)a] + g.g[(std::size_t)b]) / 2.0;
    });
}

DistMatrix dual_lipschitz_distance(const DiscreteSpace& space, const ConformalWeight& g) {
    if (g.g.size() != space.size()) throw Error(ErrorCode::BadInput, "weight size mismatch");
    return edge_weight_apsp(space, [&](int a, int b, double d) {
        return d * std::min(g.g[(std::size_t)a], g.g[(std::size_t)b]);
    });
}

DistMatrix chain_distance(const DiscreteSpace& space, const ConformalWeight& g,
                          const DistMatrix& d_i, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::BadInput, "eps must be positive");
    if (g.g.size() != space.size() || d_i.size() != space.size())
        throw Error(ErrorCode::BadInput, "size mismatch");
    const std::size_t n = space.size();

    double sup_di = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sup_di = std::max(sup_di, d_i(i, j));
    const double cap = g.max_g * sup_di;

    DistMatrix steps(n);
    for (std::size_t i = 0; i < n; ++i) {
        steps(i, i) = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (d_i(i, j) < eps)
                steps(i, j) = std::max(g.g[i], g.g[j]) * d_i(i, j);
        }
    }
    DistMatrix out = floyd_warshall(steps);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out(i, j) = std::min(out(i, j), cap);
    return out;
}

} // namespace mms
