#include "mms/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mms {

Arc::Arc(std::vector<int> nodes, const DiscreteSpace& space) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error(ErrorCode::BadInput, "arc needs at least one node");
    for (int v : nodes_)
        if (v < 0 || v >= (int)space.size())
            throw Error(ErrorCode::BadInput, "arc node out of range");
    edge_lengths_.reserve(nodes_.size() - 1);
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
        const double d = space.dist(nodes_[j - 1], nodes_[j]);
        if (!is_finite(d))
            throw Error(ErrorCode::BadInput, "consecutive arc nodes must be at finite distance");
        edge_lengths_.push_back(d);
        length_ += d;
    }
}

std::vector<double> Arc::cumulative_variation() const {
    std::vector<double> v(nodes_.size(), 0.0);
    for (std::size_t j = 1; j < nodes_.size(); ++j) v[j] = v[j - 1] + edge_lengths_[j - 1];
    return v;
}

std::vector<double> arc_measure(const Arc& arc, std::size_t n_nodes) {
    std::vector<double> nu(n_nodes, 0.0);
    const auto& nodes = arc.nodes();
    const auto& len = arc.edge_lengths();
    for (std::size_t j = 1; j < nodes.size(); ++j) {
        nu[(std::size_t)nodes[j - 1]] += len[j - 1] / 2.0;
        nu[(std::size_t)nodes[j]] += len[j - 1] / 2.0;
    }
    return nu;
}

double line_integral(const std::vector<double>& f, const Arc& arc) {
    const auto& nodes = arc.nodes();
    const auto& len = arc.edge_lengths();
    double acc = 0.0;
    for (std::size_t j = 1; j < nodes.size(); ++j)
        acc += len[j - 1] * (f[(std::size_t)nodes[j - 1]] + f[(std::size_t)nodes[j]]) / 2.0;
    return acc;
}

Arc normalize(const Arc& arc, const DiscreteSpace& space) {
    std::vector<int> out;
    out.reserve(arc.nodes().size());
    for (int v : arc.nodes())
        if (out.empty() || out.back() != v) out.push_back(v);
    if (out.size() > 1 && out.back() < out.front()) std::reverse(out.begin(), out.end());
    return Arc(std::move(out), space);
}

Arc restrict(const Arc& arc, double s, double t, const DiscreteSpace& space) {
    if (!(s >= 0.0 && s < t && t <= 1.0))
        throw Error(ErrorCode::BadInput, "restriction window must satisfy 0 <= s < t <= 1");
    const std::vector<double> var = arc.cumulative_variation();
    const double total = arc.length();
    auto snap = [&](double frac) {
        std::size_t best = 0;
        double best_gap = std::abs(var[0] - frac * total);
        for (std::size_t j = 1; j < var.size(); ++j) {
            const double gap = std::abs(var[j] - frac * total);
            if (gap < best_gap - 1e-15) {
                best_gap = gap;
                best = j;
            }
        }
        return best;
    };
    const std::size_t a = snap(s), b = snap(t);
    if (a == b) throw Error(ErrorCode::DegenerateWindow, "window snaps to a single breakpoint");
    std::vector<int> out(arc.nodes().begin() + (long)a, arc.nodes().begin() + (long)b + 1);
    return Arc(std::move(out), space);
}

PathFamily PathFamily::explicit_family(std::vector<Arc> arcs) {
    PathFamily f;
    f.arcs_ = std::move(arcs);
    return f;
}

PathFamily PathFamily::connector(std::vector<int> source, std::vector<int> target, int max_edges) {
    PathFamily f;
    f.is_connector_ = true;
    f.connector_ = Connector{std::move(source), std::move(target), max_edges};
    return f;
}

std::vector<Arc> simple_paths(const DiscreteSpace& space, const std::vector<int>& source,
                              const std::vector<int>& target, int max_edges, std::size_t cap) {
    std::vector<char> is_target(space.size(), 0);
    for (int t : target) is_target[(std::size_t)t] = 1;

    std::vector<Arc> out;
    std::vector<int> path;
    std::vector<char> on_path(space.size(), 0);

    auto emit = [&]() {
        if (out.size() >= cap)
            throw Error(ErrorCode::FamilyTooLarge, "connector family exceeds the enumeration cap");
        out.emplace_back(path, space);
    };

    // Depth-first over sorted neighbor lists keeps the emission order lexicographic
    // per source; a global sort follows normalization anyway.
    auto dfs = [&](auto&& self, int v, int depth) -> void {
        if (is_target[(std::size_t)v] && path.size() >= 1) emit();
        if (depth == max_edges) return;
        for (int u : space.neighbors()[(std::size_t)v]) {
            if (on_path[(std::size_t)u]) continue;
            on_path[(std::size_t)u] = 1;
            path.push_back(u);
            self(self, u, depth + 1);
            path.pop_back();
            on_path[(std::size_t)u] = 0;
        }
    };

    std::vector<int> sources = source;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (int s : sources) {
        path.assign(1, s);
        std::fill(on_path.begin(), on_path.end(), 0);
        on_path[(std::size_t)s] = 1;
        dfs(dfs, s, 0);
    }
    return out;
}

std::vector<Arc> enumerate_family(const PathFamily& family, const DiscreteSpace& space) {
    std::vector<Arc> raw;
    if (family.is_connector()) {
        const Connector& c = family.connector_spec();
        if (c.max_edges > kConnectorMaxEdgesGuard)
            throw Error(ErrorCode::ConnectorTooDeep, "connector maxEdges exceeds the guard of 12");
        if (c.max_edges < 0) throw Error(ErrorCode::BadInput, "negative maxEdges");
        raw = simple_paths(space, c.source, c.target, c.max_edges);
    } else {
        raw = family.explicit_arcs();
    }

    std::set<std::vector<int>> seen;
    std::vector<Arc> out;
    for (const Arc& a : raw) {
        Arc n = normalize(a, space);
        if (seen.insert(n.nodes()).second) out.push_back(std::move(n));
    }
    std::sort(out.begin(), out.end());
    if (out.size() > kFamilySizeCap)
        throw Error(ErrorCode::FamilyTooLarge, "family exceeds the enumeration cap");
    return out;
}

} // namespace mms
