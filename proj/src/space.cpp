#include "mms/space.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace mms {

namespace {

std::string describe(const std::vector<std::string>& nodes, int i) {
    return nodes.empty() ? std::to_string(i) : nodes[static_cast<std::size_t>(i)];
}

void check_report(const ValidationReport& report, const std::vector<std::string>& nodes) {
    if (report.valid()) return;
    std::ostringstream msg;
    msg << "invalid space: " << report.violations.size() << " violation(s); first: ";
    const Violation& v = report.violations.front();
    switch (v.kind) {
        case Violation::Kind::Symmetry:
            msg << "symmetry at (" << describe(nodes, v.i) << "," << describe(nodes, v.j) << ")";
            break;
        case Violation::Kind::Diagonal:
            msg << "nonzero diagonal at " << describe(nodes, v.i);
            break;
        case Violation::Kind::Positivity:
            msg << "nonpositive distance at (" << describe(nodes, v.i) << "," << describe(nodes, v.j) << ")";
            break;
        case Violation::Kind::Triangle:
            msg << "triangle violation (" << describe(nodes, v.i) << "," << describe(nodes, v.j)
                << "," << describe(nodes, v.k) << ")";
            break;
        case Violation::Kind::Measure:
            msg << "nonpositive measure at " << describe(nodes, v.i);
            break;
    }
    msg << " [" << v.detail << "]";
    throw Error(ErrorCode::InvalidSpace, msg.str());
}

} // namespace

ValidationReport validate_raw(const DistMatrix& dist, const std::vector<double>& measure,
                              std::uint64_t triangle_sample_seed) {
    ValidationReport report;
    const std::size_t n = dist.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (dist(i, i) != 0.0) {
            report.violations.push_back({Violation::Kind::Diagonal, (int)i, (int)i, -1,
                                         "dist(x,x) = " + std::to_string(dist(i, i))});
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = dist(i, j), b = dist(j, i);
            if (!(a == b) && !(std::isinf(a) && std::isinf(b))) {
                report.violations.push_back({Violation::Kind::Symmetry, (int)i, (int)j, -1,
                                             std::to_string(a) + " != " + std::to_string(b)});
            }
            if (a <= 0.0) {
                report.violations.push_back({Violation::Kind::Positivity, (int)i, (int)j, -1,
                                             "dist = " + std::to_string(a)});
            }
        }
    }
    for (std::size_t i = 0; i < measure.size(); ++i) {
        if (!(measure[i] > 0.0) || !is_finite(measure[i])) {
            report.violations.push_back({Violation::Kind::Measure, (int)i, -1, -1,
                                         "m = " + std::to_string(measure[i])});
        }
    }

    auto triangle_bad = [&](std::size_t a, std::size_t b, std::size_t c) {
        // d(a,c) <= d(a,b) + d(b,c); violated only when the right side is finite.
        const double ab = dist(a, b), bc = dist(b, c), ac = dist(a, c);
        if (!is_finite(ab) || !is_finite(bc)) return false;
        return ac > ab + bc + 1e-12 * (1.0 + ab + bc);
    };

    if (n <= 500) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    if (a == b || b == c || a == c) continue;
                    if (triangle_bad(a, b, c)) {
                        report.violations.push_back({Violation::Kind::Triangle, (int)a, (int)b, (int)c,
                                                     "d(a,c) > d(a,b)+d(b,c)"});
                        if (report.violations.size() > 200) return report;
                    }
                }
    } else {
        report.triangle_sampled = true;
        std::mt19937_64 rng(triangle_sample_seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (int s = 0; s < 100000; ++s) {
            std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
            if (a == b || b == c || a == c) continue;
            if (triangle_bad(a, b, c)) {
                report.violations.push_back({Violation::Kind::Triangle, (int)a, (int)b, (int)c,
                                             "d(a,c) > d(a,b)+d(b,c) (sampled)"});
                if (report.violations.size() > 200) return report;
            }
        }
    }
    return report;
}

ValidationReport validate(const DiscreteSpace& space) {
    return validate_raw(space.dist(), space.measure());
}

DiscreteSpace DiscreteSpace::from_matrix(std::vector<std::string> nodes, DistMatrix dist,
                                         std::vector<double> measure) {
    if (nodes.size() != dist.size() || nodes.size() != measure.size())
        throw Error(ErrorCode::BadInput, "node/dist/measure size mismatch");
    ValidationReport report = validate_raw(dist, measure);
    check_report(report, nodes);

    DiscreteSpace s;
    s.nodes_ = std::move(nodes);
    s.dist_ = std::move(dist);
    s.measure_ = std::move(measure);
    std::vector<std::pair<int, int>> edges;
    const std::size_t n = s.nodes_.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (is_finite(s.dist_(i, j))) edges.emplace_back((int)i, (int)j);
    s.build_adjacency_from_edges(edges);
    return s;
}

DiscreteSpace DiscreteSpace::from_graph(std::vector<std::string> nodes,
                                        const std::vector<std::tuple<int, int, double>>& edges,
                                        std::vector<double> measure) {
    const std::size_t n = nodes.size();
    if (n != measure.size()) throw Error(ErrorCode::BadInput, "node/measure size mismatch");
    DistMatrix w(n);
    for (std::size_t i = 0; i < n; ++i) w(i, i) = 0.0;
    std::vector<std::pair<int, int>> adj;
    for (const auto& [a, b, len] : edges) {
        if (a < 0 || b < 0 || a >= (int)n || b >= (int)n || a == b)
            throw Error(ErrorCode::BadInput, "bad edge endpoints");
        if (!(len > 0.0) || !is_finite(len))
            throw Error(ErrorCode::BadInput, "edge weight must be positive and finite");
        const auto i = (std::size_t)std::min(a, b), j = (std::size_t)std::max(a, b);
        if (len < w(i, j)) {
            w(i, j) = w(j, i) = len;
        }
        adj.emplace_back((int)i, (int)j);
    }
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());

    // Floyd-Warshall closure turns the edge weights into the path metric.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_finite(w(i, k))) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_finite(w(k, j))) continue;
                const double thru = w(i, k) + w(k, j);
                if (thru < w(i, j)) w(i, j) = w(j, i) = thru;
            }
        }

    ValidationReport report = validate_raw(w, measure);
    check_report(report, nodes);

    DiscreteSpace s;
    s.nodes_ = std::move(nodes);
    s.dist_ = std::move(w);
    s.measure_ = std::move(measure);
    s.build_adjacency_from_edges(adj);
    return s;
}

void DiscreteSpace::build_adjacency_from_edges(const std::vector<std::pair<int, int>>& edges) {
    edges_ = edges;
    neighbors_.assign(nodes_.size(), {});
    for (auto [i, j] : edges_) {
        neighbors_[(std::size_t)i].push_back(j);
        neighbors_[(std::size_t)j].push_back(i);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

double DiscreteSpace::total_mass() const {
    return std::accumulate(measure_.begin(), measure_.end(), 0.0);
}

int DiscreteSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i] == name) return (int)i;
    return -1;
}

bool DiscreteSpace::connected() const {
    const std::size_t n = size();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : neighbors_[(std::size_t)v])
            if (!seen[(std::size_t)u]) {
                seen[(std::size_t)u] = 1;
                stack.push_back(u);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

SemidistanceFamily::SemidistanceFamily(std::vector<DistMatrix> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorCode::BadInput, "empty semidistance family");
    const std::size_t n = members_.front().size();
    for (std::size_t m = 0; m < members_.size(); ++m) {
        const DistMatrix& d = members_[m];
        if (d.size() != n) throw Error(ErrorCode::BadInput, "family member size mismatch");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_finite(d(i, j)) || d(i, j) < 0.0)
                    throw Error(ErrorCode::BadInput, "family members must be finite and nonnegative");
                if (m > 0 && d(i, j) < members_[m - 1](i, j) - 1e-15)
                    throw Error(ErrorCode::BadInput, "family members must be entrywise nondecreasing");
            }
    }
}

SemidistanceFamily truncated_family(const DiscreteSpace& space,
                                    const std::vector<double>& thresholds) {
    if (thresholds.empty())
        throw Error(ErrorCode::NonAscendingThresholds, "no thresholds given");
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > 0.0))
            throw Error(ErrorCode::NonAscendingThresholds, "thresholds must be positive");
        if (k > 0 && !(thresholds[k] > thresholds[k - 1]))
            throw Error(ErrorCode::NonAscendingThresholds, "thresholds must be strictly ascending");
    }
    if (thresholds.back() < space.max_finite_dist())
        throw Error(ErrorCode::NonAscendingThresholds,
                    "last threshold must dominate every finite distance");

    const std::size_t n = space.size();
    std::vector<DistMatrix> members;
    members.reserve(thresholds.size());
    for (double t : thresholds) {
        DistMatrix d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d(i, j) = std::min(space.dist()((int)i, (int)j), t);
        members.push_back(std::move(d));
    }
    return SemidistanceFamily(std::move(members));
}

} // namespace mms
