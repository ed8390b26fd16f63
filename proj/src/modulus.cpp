#include "mms/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mms/shortest_paths.hpp"
#include "mms/solvers.hpp"

namespace mms {

void require_exponent(double p) {
    if (!(p > 1.0) || !is_finite(p))
        throw Error(ErrorCode::BadInput, "exponent p must lie in (1, infinity)");
}

namespace {

// Active-set Newton polish: with the active rows pinned as equalities and the
// zero coordinates eliminated, the KKT system
//     p m_x f_x^{p-1} = sum_r lambda_r a_r(x),   a_r . f = b_r
// is smooth and square; a few Newton steps take the barrier iterate to
// machine-precision stationarity. Returns false (leaving f untouched) when the
// guess is poor or the system degenerates.
bool kkt_polish(const std::vector<std::vector<double>>& rows, const std::vector<double>& bounds,
                const std::vector<std::size_t>& active_rows, const std::vector<char>& at_zero,
                const std::vector<double>& measure, double p, std::vector<double>& f,
                std::vector<double>& lambda) {
    const std::size_t n = measure.size();
    std::vector<std::size_t> free_x;
    for (std::size_t x = 0; x < n; ++x)
        if (!at_zero[x]) free_x.push_back(x);
    const std::size_t nf = free_x.size();
    const std::size_t na = active_rows.size();
    if (na == 0 || na > nf) return false;

    std::vector<double> ftrial = f, ltrial = lambda;
    for (std::size_t x = 0; x < n; ++x)
        if (at_zero[x]) ftrial[x] = 0.0;
    for (int it = 0; it < 40; ++it) {
        // residuals
        std::vector<double> rhs(nf + na, 0.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t x = free_x[i];
            double r = p * measure[x] * std::pow(ftrial[x], p - 1.0);
            for (std::size_t k = 0; k < na; ++k) r -= ltrial[k] * rows[active_rows[k]][x];
            rhs[i] = -r;
            worst = std::max(worst, std::abs(r));
        }
        for (std::size_t k = 0; k < na; ++k) {
            double r = -bounds[active_rows[k]];
            for (std::size_t i = 0; i < nf; ++i) r += rows[active_rows[k]][free_x[i]] * ftrial[free_x[i]];
            rhs[nf + k] = -r;
            worst = std::max(worst, std::abs(r));
        }
        if (worst <= 1e-13) break;

        Mat kkt(nf + na, nf + na, 0.0);
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t x = free_x[i];
            kkt(i, i) = p * (p - 1.0) * measure[x] * std::pow(ftrial[x], p - 2.0);
            for (std::size_t k = 0; k < na; ++k) {
                kkt(i, nf + k) = -rows[active_rows[k]][x];
                kkt(nf + k, i) = rows[active_rows[k]][x];
            }
        }
        std::vector<double> step;
        try {
            LdltSolver solver(kkt);
            step = solver.solve(rhs);
        } catch (const std::exception&) {
            return false;
        }
        double alpha = 1.0;
        for (std::size_t i = 0; i < nf; ++i)
            if (step[i] < 0.0 && ftrial[free_x[i]] + step[i] <= 0.0)
                alpha = std::min(alpha, -0.9 * ftrial[free_x[i]] / step[i]);
        for (std::size_t i = 0; i < nf; ++i) ftrial[free_x[i]] += alpha * step[i];
        for (std::size_t k = 0; k < na; ++k) ltrial[k] += alpha * step[nf + k];
        if (!(alpha > 1e-6)) return false;
    }

    for (std::size_t k = 0; k < na; ++k)
        if (ltrial[k] < -1e-9) return false;
    for (std::size_t i = 0; i < nf; ++i)
        if (!(ftrial[free_x[i]] >= -1e-12)) return false;
    // every row must still be satisfied
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) acc += rows[r][x] * ftrial[x];
        if (acc < bounds[r] - 1e-9 * (1.0 + std::abs(bounds[r]))) return false;
    }
    f = ftrial;
    lambda = ltrial;
    return true;
}

// Dual lower bound from multipliers on the working rows:
//   g(lambda) = lambda.b - (p-1) sum_x m_x^{1-q} (c_x / p)^q,  c = A^T lambda.
double dual_bound(const std::vector<std::vector<double>>& rows, const std::vector<double>& bounds,
                  const std::vector<std::size_t>& working, const std::vector<double>& lambda,
                  const std::vector<double>& measure, double p) {
    const double q = p / (p - 1.0);
    std::vector<double> c(measure.size(), 0.0);
    double lb = 0.0;
    for (std::size_t k = 0; k < working.size(); ++k) {
        lb += lambda[k] * bounds[working[k]];
        const auto& row = rows[working[k]];
        for (std::size_t x = 0; x < row.size(); ++x) c[x] += lambda[k] * row[x];
    }
    for (std::size_t x = 0; x < measure.size(); ++x)
        lb -= (p - 1.0) * std::pow(measure[x], 1.0 - q) * std::pow(c[x] / p, q);
    return lb;
}

} // namespace

ModulusSolution constrained_p_energy(const std::vector<std::vector<double>>& rows,
                                     const std::vector<double>& bounds,
                                     const std::vector<double>& measure, double p,
                                     const ModulusOptions& opts) {
    require_exponent(p);
    const std::size_t n = measure.size();
    ModulusSolution sol;

    // Constraints with a nonpositive bound are vacuous for f >= 0.
    std::vector<std::size_t> relevant;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (bounds[r] <= 0.0) continue;
        double row_sum = 0.0;
        for (double v : rows[r]) row_sum += v;
        if (row_sum <= 0.0) {
            sol.value = kInf;
            sol.converged = true;
            return sol; // a positive bound with an all-zero row cannot be met
        }
        relevant.push_back(r);
    }
    if (relevant.empty()) {
        sol.value = 0.0;
        return sol;
    }

    auto row_dot = [&](std::size_t r, const std::vector<double>& f) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) acc += rows[r][x] * f[x];
        return acc;
    };

    // Working set grows by separation; first fill from the most demanding rows.
    std::vector<std::size_t> working;
    {
        std::vector<std::size_t> order = relevant;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double sa = 0.0, sb = 0.0;
            for (double v : rows[a]) sa += v;
            for (double v : rows[b]) sb += v;
            return bounds[a] / sa > bounds[b] / sb;
        });
        const std::size_t seed_count = std::min<std::size_t>(order.size(), 4 * n + 16);
        working.assign(order.begin(), order.begin() + (long)seed_count);
        std::sort(working.begin(), working.end());
    }

    std::vector<SeparableTerm> terms(n);
    for (std::size_t x = 0; x < n; ++x)
        terms[x] = SeparableTerm{SeparableTerm::Kind::Power, measure[x], p};

    std::vector<double> f;
    double upper = kInf, lower = 0.0;
    int rounds = 0;
    std::vector<double> last_lambda;
    std::vector<std::size_t> last_working;
    double last_mu = 0.0;

    for (; rounds < opts.max_rounds; ++rounds) {
        const std::size_t m = working.size();
        Mat a_ub(m + n, n, 0.0);
        std::vector<double> b_ub(m + n, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t x = 0; x < n; ++x) a_ub(k, x) = -rows[working[k]][x];
            b_ub[k] = -bounds[working[k]];
        }
        for (std::size_t x = 0; x < n; ++x) a_ub(m + x, x) = -1.0; // f >= 0

        // Strictly feasible start: constant level clearing every working row,
        // with a tiny seeded tilt so distinct starts exist for uniqueness tests.
        double level = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double row_sum = 0.0;
            for (double v : rows[working[k]]) row_sum += v;
            level = std::max(level, bounds[working[k]] / row_sum);
        }
        std::vector<double> x0(n, 1.5 * level + 1e-3);
        if (opts.start_seed != 0) {
            std::mt19937_64 rng(opts.start_seed);
            std::uniform_real_distribution<double> jitter(1.0, 2.0);
            for (double& v : x0) v *= jitter(rng);
        }

        BarrierOptions bopts;
        bopts.tol_gap = opts.tol_gap * std::max(1.0, std::pow(level, p));
        bopts.mu0 = std::max(1.0, std::pow(level, p));
        BarrierResult res = barrier_minimize(terms, a_ub, b_ub, Mat(0, n), {}, x0, bopts);
        sol.iterations += res.newton_iterations;

        // Feasible rescale over the working rows gives the primal bound.
        double rho = kInf;
        for (std::size_t k = 0; k < m; ++k)
            rho = std::min(rho, row_dot(working[k], res.x) / bounds[working[k]]);
        std::vector<double> f_feas = res.x;
        if (rho < 1.0)
            for (double& v : f_feas) v /= rho;
        double u = 0.0;
        for (std::size_t x = 0; x < n; ++x) u += measure[x] * std::pow(f_feas[x], p);

        std::vector<double> lambda(res.ineq_multipliers.begin(),
                                   res.ineq_multipliers.begin() + (long)m);
        const double lb = dual_bound(rows, bounds, working, lambda, measure, p);

        f = res.x;
        upper = u;
        lower = std::max(lower, lb);
        last_lambda = lambda;
        last_working = working;
        last_mu = res.mu_final;
        if (rho < 1.0) f = f_feas;

        // Separation over the full row set.
        double worst = 0.0;
        std::vector<std::pair<double, std::size_t>> violated;
        for (std::size_t r : relevant) {
            const double margin = row_dot(r, f) - bounds[r];
            if (margin < -opts.separation_tol * std::max(1.0, bounds[r]))
                violated.emplace_back(margin, r);
            worst = std::min(worst, margin);
        }
        if (violated.empty()) break;
        std::sort(violated.begin(), violated.end());
        std::size_t added = 0;
        for (const auto& [margin, r] : violated) {
            if (std::find(working.begin(), working.end(), r) == working.end()) {
                working.push_back(r);
                if (++added >= 64) break;
            }
        }
        if (added == 0) break;
        std::sort(working.begin(), working.end());
    }

    // Active-set polish sharpens the density from barrier accuracy to
    // stationarity; keep the barrier iterate when the guess does not verify.
    if (!f.empty() && !last_working.empty()) {
        const double fscale = 1.0 + norm_inf(f);
        std::vector<char> at_zero(n, 0);
        for (std::size_t x = 0; x < n; ++x)
            if (f[x] <= std::sqrt(last_mu) * fscale) at_zero[x] = 1;
        std::vector<std::size_t> active_rows;
        std::vector<double> active_lambda;
        for (std::size_t k = 0; k < last_working.size(); ++k) {
            const std::size_t r = last_working[k];
            double slack = -bounds[r];
            for (std::size_t x = 0; x < n; ++x) slack += rows[r][x] * f[x];
            if (slack <= std::sqrt(last_mu) * (1.0 + std::abs(bounds[r]))) {
                active_rows.push_back(r);
                active_lambda.push_back(last_lambda[k]);
            }
        }
        std::vector<double> fp = f, lp = active_lambda;
        if (kkt_polish(rows, bounds, active_rows, at_zero, measure, p, fp, lp)) {
            double val = 0.0;
            for (std::size_t x = 0; x < n; ++x) val += measure[x] * std::pow(fp[x], p);
            if (val <= upper + 1e-9 * (1.0 + upper)) {
                f = fp;
                upper = val;
                lower = std::max(lower, dual_bound(rows, bounds, active_rows, lp, measure, p));
            }
        }
    }

    sol.value = upper;
    sol.density = f;
    sol.achieved_gap = (upper - lower) / std::max(upper, 1e-12);
    sol.converged = sol.achieved_gap <= 64.0 * opts.tol_gap + 1e-7 && rounds < opts.max_rounds;

    for (std::size_t r : relevant)
        if (row_dot(r, f) <= bounds[r] * (1.0 + 1e-6)) sol.active.push_back(r);
    if (sol.value <= 1e-300) sol.density.clear();
    return sol;
}

namespace {

ModulusSolution modulus_impl(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                             bool tilde, const ModulusOptions& opts) {
    require_exponent(p);
    ModulusSolution sol;
    if (family.empty()) {
        sol.value = 0.0;
        return sol;
    }
    if (!tilde) {
        for (const Arc& a : family)
            if (a.constant()) {
                sol.value = kInf;
                return sol;
            }
    }

    const std::size_t n = space.size();
    std::vector<std::vector<double>> rows;
    rows.reserve(family.size());
    for (const Arc& a : family) {
        std::vector<double> row = arc_measure(a, n);
        if (tilde) {
            row[(std::size_t)a.first()] += 1.0;
            row[(std::size_t)a.last()] += 1.0;
        }
        rows.push_back(std::move(row));
    }
    std::vector<double> bounds(family.size(), 1.0);
    return constrained_p_energy(rows, bounds, space.measure(), p, opts);
}

} // namespace

ModulusSolution modulus_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                          const ModulusOptions& opts) {
    return modulus_impl(family, space, p, false, opts);
}

ModulusSolution modulus_tilde_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                                const ModulusOptions& opts) {
    return modulus_impl(family, space, p, true, opts);
}

SeparationResult min_integral_path(const DiscreteSpace& space, const std::vector<double>& f,
                                   const std::vector<int>& source, const std::vector<int>& target) {
    WeightedGraph graph(space.size());
    for (auto [a, b] : space.edges()) {
        const double w = space.dist(a, b) * (f[(std::size_t)a] + f[(std::size_t)b]) / 2.0;
        graph[(std::size_t)a].push_back({b, w});
        graph[(std::size_t)b].push_back({a, w});
    }
    const ShortestPathTree tree = dijkstra(graph, source);
    SeparationResult out;
    int best = -1;
    for (int t : target)
        if (tree.dist[(std::size_t)t] < out.min_integral) {
            out.min_integral = tree.dist[(std::size_t)t];
            best = t;
        }
    if (best >= 0) out.path = reconstruct_path(tree, best);
    return out;
}

FugledeReport fuglede_check(const DiscreteSpace& space, double p,
                            const std::vector<std::vector<double>>& f_sequence,
                            const std::vector<double>& f_limit, const std::vector<Arc>& family) {
    require_exponent(p);
    FugledeReport rep;
    const std::size_t n = space.size();

    double max_len = 0.0;
    for (const Arc& a : family) max_len = std::max(max_len, a.length());
    double inv_m = 0.0;
    for (double m : space.measure()) inv_m = std::max(inv_m, std::pow(m, -1.0 / p));

    std::vector<double> lp_norms;
    for (const auto& fk : f_sequence) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            acc += space.measure(x) * std::pow(std::abs(fk[x] - f_limit[x]), p);
        lp_norms.push_back(std::pow(acc, 1.0 / p));
    }

    for (std::size_t k = 0; k < f_sequence.size(); ++k) {
        std::vector<double> diff(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) diff[x] = std::abs(f_sequence[k][x] - f_limit[x]);
        double worst = 0.0;
        for (const Arc& a : family) worst = std::max(worst, line_integral(diff, a));
        double tail = 0.0;
        for (std::size_t j = k; j < lp_norms.size(); ++j) tail += lp_norms[j];
        rep.per_step_worst.push_back(worst);
        rep.declared_bound.push_back(tail * max_len * inv_m);
        if (worst > rep.declared_bound.back() + 1e-12) rep.pass = false;
    }
    return rep;
}

} // namespace mms
