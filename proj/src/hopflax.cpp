#include "mms/hopflax.hpp"

#include <algorithm>
#include <cmath>

#include "mms/modulus.hpp"
#include "mms/solvers.hpp"

namespace mms {

namespace {

double conjugate(double p) {
    require_exponent(p);
    return p / (p - 1.0);
}

double lip_constant(const std::vector<double>& f, const DistMatrix& delta) {
    const std::size_t n = delta.size();
    double lip = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y || !is_finite(delta(x, y))) continue;
            if (delta(x, y) <= 0.0) {
                if (std::abs(f[x] - f[y]) > 0.0) return kInf;
                continue;
            }
            lip = std::max(lip, std::abs(f[x] - f[y]) / delta(x, y));
        }
    return lip;
}

std::vector<double> adjacency_lip(const std::vector<double>& f, const DiscreteSpace& space) {
    std::vector<double> lip(space.size(), 0.0);
    for (auto [a, b] : space.edges()) {
        const double s = std::abs(f[(std::size_t)a] - f[(std::size_t)b]) / space.dist(a, b);
        lip[(std::size_t)a] = std::max(lip[(std::size_t)a], s);
        lip[(std::size_t)b] = std::max(lip[(std::size_t)b], s);
    }
    return lip;
}

} // namespace

HopfLaxState hopf_lax(const std::vector<double>& f, double t, const DiscreteSpace& space,
                      const std::vector<int>& K, const DistMatrix& delta, double p) {
    const double q = conjugate(p);
    if (K.empty()) throw Error(ErrorCode::EmptyK, "K must be nonempty");
    if (!(t > 0.0)) throw Error(ErrorCode::BadInput, "t must be positive");
    const std::size_t n = space.size();

    HopfLaxState st;
    st.t = t;
    st.values.assign(n, kInf);
    st.minimizers.assign(n, {});
    st.d_plus.assign(n, 0.0);
    st.d_minus.assign(n, 0.0);

    const double denom = q * std::pow(t, q - 1.0);
    for (std::size_t x = 0; x < n; ++x) {
        double best = kInf;
        for (int y : K) {
            const double d = delta(x, (std::size_t)y);
            if (!is_finite(d)) continue;
            best = std::min(best, f[(std::size_t)y] + std::pow(d, q) / denom);
        }
        st.values[x] = best;
        if (!is_finite(best)) continue;
        const double tol = 1e-12 * (1.0 + std::abs(best));
        double dmin = kInf, dmax = 0.0;
        for (int y : K) {
            const double d = delta(x, (std::size_t)y);
            if (!is_finite(d)) continue;
            if (f[(std::size_t)y] + std::pow(d, q) / denom <= best + tol) {
                st.minimizers[x].push_back(y);
                dmin = std::min(dmin, d);
                dmax = std::max(dmax, d);
            }
        }
        st.d_minus[x] = dmin;
        st.d_plus[x] = dmax;
    }
    return st;
}

double spread_integral(const std::vector<double>& f, const DiscreteSpace& space,
                       const DistMatrix& delta, double p, int node, double t, double tol,
                       int max_evals) {
    const double q = conjugate(p);
    std::vector<int> all(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) all[i] = (int)i;
    auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        const HopfLaxState st = hopf_lax(f, t * r, space, all, delta, p);
        const double d = st.d_plus[(std::size_t)node];
        if (d <= 0.0) return 0.0;
        return std::pow(d / (t * r), q);
    };
    const QuadratureResult quad = adaptive_simpson(integrand, 0.0, 1.0, tol, max_evals);
    return t / p * quad.value;
}

EstimateSuiteReport estimate_suite(const std::vector<double>& f, const DiscreteSpace& space,
                                   const DistMatrix& delta, const std::vector<double>& time_grid,
                                   double p) {
    const double q = conjugate(p);
    const std::size_t n = space.size();
    for (std::size_t i = 1; i < time_grid.size(); ++i)
        if (!(time_grid[i] > time_grid[i - 1]) || !(time_grid[0] > 0.0))
            throw Error(ErrorCode::BadInput, "time grid must be ascending and positive");

    std::vector<int> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = (int)i;

    const double fmin = *std::min_element(f.begin(), f.end());
    const double fmax = *std::max_element(f.begin(), f.end());
    const double osc = fmax - fmin;
    const double lip = lip_constant(f, delta);
    const std::vector<double> lip_local = adjacency_lip(f, space);

    std::vector<HopfLaxState> states;
    states.reserve(time_grid.size());
    for (double t : time_grid) states.push_back(hopf_lax(f, t, space, all, delta, p));

    EstimateSuiteReport rep;
    EstimateCheck bounds{"bounds", 0.0, true};
    EstimateCheck monotone{"d_monotonicity", 0.0, true};
    EstimateCheck slope_cap{"slope_cap", 0.0, true};
    EstimateCheck integral{"integral_identity", 0.0, true};
    EstimateCheck upper_slope{"upper_slope", 0.0, true};

    // (i) min f <= Q_t f <= max f (K = X, so the excess constant vanishes)
    for (const auto& st : states)
        for (std::size_t x = 0; x < n; ++x) {
            const double r = std::max(fmin - st.values[x], st.values[x] - fmax);
            bounds.worst_residual = std::max(bounds.worst_residual, r);
        }
    bounds.pass = bounds.worst_residual <= 1e-10 * (1.0 + osc);

    // (ii) D^+_s <= D^-_t across the grid; strict d_minus < d_plus gaps are the
    // minimizer-switch times and stay below n * |K|.
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
        for (std::size_t x = 0; x < n; ++x) {
            const double r = states[i].d_plus[x] - states[i + 1].d_minus[x];
            monotone.worst_residual = std::max(monotone.worst_residual, r);
        }
    monotone.pass = monotone.worst_residual <= 1e-10 * (1.0 + space.max_finite_dist());
    for (const auto& st : states) {
        bool gap = false;
        for (std::size_t x = 0; x < n; ++x)
            if (st.d_plus[x] > st.d_minus[x] + 1e-12) gap = true;
        if (gap) ++rep.d_gap_times;
    }
    rep.d_gap_allowance = (int)(n * n);

    // (iii) (D_t^+ / t)^q <= min(q Osc(f) / t, (q Lip(f))^p)
    for (const auto& st : states)
        for (std::size_t x = 0; x < n; ++x) {
            const double lhs = std::pow(st.d_plus[x] / st.t, q);
            const double cap = std::min(q * osc / st.t, std::pow(q * lip, p));
            slope_cap.worst_residual =
                std::max(slope_cap.worst_residual, (lhs - cap) / (1.0 + cap));
        }
    slope_cap.pass = slope_cap.worst_residual <= 1e-9;

    // (iv) f(x) - Q_t f(x) equals the spread integral at the largest grid time.
    {
        const double t = time_grid.back();
        const HopfLaxState& st = states.back();
        for (std::size_t x = 0; x < n; ++x) {
            const double lhs = f[x] - st.values[x];
            const double rhs = spread_integral(f, space, delta, p, (int)x, t, 1e-8);
            const double r = std::abs(lhs - rhs) / (1.0 + std::abs(f[x]));
            integral.worst_residual = std::max(integral.worst_residual, r);
        }
        integral.pass = integral.worst_residual <= 1e-6;
    }

    // (v) difference quotient at the smallest grid time against the local slope
    {
        const double t = time_grid.front();
        const HopfLaxState& st = states.front();
        for (std::size_t x = 0; x < n; ++x) {
            const double quotient = (f[x] - st.values[x]) / t;
            const double cap = std::pow(lip_local[x], p) / p;
            upper_slope.worst_residual =
                std::max(upper_slope.worst_residual, (quotient - cap) / (1.0 + cap));
        }
        upper_slope.pass = upper_slope.worst_residual <= 1e-9;
    }

    rep.checks = {bounds, monotone, slope_cap, integral, upper_slope};
    return rep;
}

MonotoneReport monotone_in_K(const std::vector<double>& f, const DiscreteSpace& space,
                             const DistMatrix& delta, const std::vector<std::vector<int>>& k_chain,
                             double t, double p) {
    MonotoneReport rep;
    if (k_chain.empty()) throw Error(ErrorCode::EmptyK, "empty chain");
    std::vector<double> prev;
    for (std::size_t c = 0; c < k_chain.size(); ++c) {
        for (std::size_t e = 0; c > 0 && e < k_chain[c - 1].size(); ++e) {
            if (std::find(k_chain[c].begin(), k_chain[c].end(), k_chain[c - 1][e]) == k_chain[c].end())
                throw Error(ErrorCode::BadInput, "K chain is not nested");
        }
        const HopfLaxState st = hopf_lax(f, t, space, k_chain[c], delta, p);
        if (!prev.empty())
            for (std::size_t x = 0; x < st.values.size(); ++x)
                rep.worst_residual = std::max(rep.worst_residual, st.values[x] - prev[x]);
        prev = st.values;
    }
    std::vector<int> all(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) all[i] = (int)i;
    if (k_chain.back().size() != space.size())
        throw Error(ErrorCode::BadInput, "chain must end at the full node set");
    const HopfLaxState full = hopf_lax(f, t, space, all, delta, p);
    for (std::size_t x = 0; x < full.values.size(); ++x)
        rep.worst_residual = std::max(rep.worst_residual, std::abs(full.values[x] - prev[x]));
    rep.pass = rep.worst_residual <= 1e-12 * (1.0 + norm_inf(f));
    return rep;
}

MonotoneReport monotone_in_delta(const std::vector<double>& f, const DiscreteSpace& space,
                                 const SemidistanceFamily& family, double t, double p) {
    MonotoneReport rep;
    std::vector<int> all(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) all[i] = (int)i;

    std::vector<double> prev;
    HopfLaxState last;
    for (std::size_t i = 0; i < family.size(); ++i) {
        last = hopf_lax(f, t, space, all, family.member(i), p);
        if (!prev.empty())
            for (std::size_t x = 0; x < last.values.size(); ++x)
                rep.worst_residual = std::max(rep.worst_residual, prev[x] - last.values[x]);
        prev = last.values;
    }
    const HopfLaxState full = hopf_lax(f, t, space, all, space.dist(), p);
    for (std::size_t x = 0; x < full.values.size(); ++x) {
        rep.worst_residual = std::max(rep.worst_residual, std::abs(full.values[x] - last.values[x]));
        // limsup D^{d_i,+} <= D^+ at the final member
        rep.worst_residual = std::max(rep.worst_residual, last.d_plus[x] - full.d_plus[x] - 1e-12);
    }
    rep.pass = rep.worst_residual <= 1e-12 * (1.0 + norm_inf(f) + space.max_finite_dist());
    return rep;
}

} // namespace mms
