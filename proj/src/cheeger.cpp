#include "mms/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <set>

#include "mms/conformal.hpp"
#include "mms/shortest_paths.hpp"
#include "mms/solvers.hpp"
#include "mms/transport.hpp"

namespace mms {

std::vector<double> lip_field(const std::vector<double>& f, const DiscreteSpace& space) {
    std::vector<double> lip(space.size(), 0.0);
    for (auto [a, b] : space.edges()) {
        const double s = std::abs(f[(std::size_t)a] - f[(std::size_t)b]) / space.dist(a, b);
        lip[(std::size_t)a] = std::max(lip[(std::size_t)a], s);
        lip[(std::size_t)b] = std::max(lip[(std::size_t)b], s);
    }
    return lip;
}

double pre_cheeger(const std::vector<double>& f, const DiscreteSpace& space, double p) {
    require_exponent(p);
    const std::vector<double> lip = lip_field(f, space);
    double acc = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x)
        acc += space.measure(x) * std::pow(lip[x], p);
    return acc;
}

namespace {

std::vector<int> component_labels(const DiscreteSpace& space) {
    std::vector<int> label(space.size(), -1);
    int comp = 0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (label[s] >= 0) continue;
        std::vector<std::size_t> stack{s};
        label[s] = comp;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (int u : space.neighbors()[v])
                if (label[(std::size_t)u] < 0) {
                    label[(std::size_t)u] = comp;
                    stack.push_back((std::size_t)u);
                }
        }
        ++comp;
    }
    return label;
}

bool componentwise_zero_mean(const std::vector<double>& h, const DiscreteSpace& space,
                             const std::vector<int>& label, int comps) {
    std::vector<double> sums((std::size_t)comps, 0.0);
    double scale = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x) {
        sums[(std::size_t)label[x]] += space.measure(x) * h[x];
        scale += space.measure(x) * std::abs(h[x]);
    }
    for (double s : sums)
        if (std::abs(s) > 1e-9 * (1.0 + scale)) return false;
    return true;
}

} // namespace

CalculusReport lip_calculus_suite(const DiscreteSpace& space, int samples, std::uint64_t seed) {
    CalculusReport rep;
    RuleCheck sublinear{"sublinearity", 0.0, true};
    RuleCheck product{"product_rule_star", 0.0, true};
    RuleCheck interp{"interpolation_star", 0.0, true};
    RuleCheck chain{"chain_rule_mean_value", 0.0, true};
    RuleCheck contraction{"normal_contraction_edge", 0.0, true};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = space.size();

    auto star_max = [&](const std::vector<double>& v, std::size_t x) {
        double m = v[x];
        for (int u : space.neighbors()[x]) m = std::max(m, v[(std::size_t)u]);
        return m;
    };

    for (int s = 0; s < samples; ++s) {
        std::vector<double> f(n), g(n), chi(n);
        for (std::size_t x = 0; x < n; ++x) {
            f[x] = unif(rng);
            g[x] = unif(rng);
            chi[x] = unit(rng);
        }
        const double alpha = unif(rng), beta = unif(rng);

        const std::vector<double> lf = lip_field(f, space);
        const std::vector<double> lg = lip_field(g, space);
        const std::vector<double> lchi = lip_field(chi, space);

        // lip(alpha f + beta g) <= |alpha| lip f + |beta| lip g
        {
            std::vector<double> comb(n);
            for (std::size_t x = 0; x < n; ++x) comb[x] = alpha * f[x] + beta * g[x];
            const std::vector<double> lc = lip_field(comb, space);
            for (std::size_t x = 0; x < n; ++x)
                sublinear.worst_residual = std::max(
                    sublinear.worst_residual,
                    lc[x] - (std::abs(alpha) * lf[x] + std::abs(beta) * lg[x]));
        }

        // lip(fg) <= sup_star|f| lip g + sup_star|g| lip f
        {
            std::vector<double> prod(n), absf(n), absg(n);
            for (std::size_t x = 0; x < n; ++x) {
                prod[x] = f[x] * g[x];
                absf[x] = std::abs(f[x]);
                absg[x] = std::abs(g[x]);
            }
            const std::vector<double> lp = lip_field(prod, space);
            for (std::size_t x = 0; x < n; ++x)
                product.worst_residual =
                    std::max(product.worst_residual,
                             lp[x] - (star_max(absf, x) * lg[x] + star_max(absg, x) * lf[x]));
        }

        // lip((1-chi) f + chi g) <= sup_star(1-chi) lip f + sup_star chi lip g
        //                           + lip chi |f - g|(x)
        {
            std::vector<double> mix(n), one_minus(n), fg_abs(n);
            for (std::size_t x = 0; x < n; ++x) {
                mix[x] = (1.0 - chi[x]) * f[x] + chi[x] * g[x];
                one_minus[x] = 1.0 - chi[x];
                fg_abs[x] = std::abs(f[x] - g[x]);
            }
            const std::vector<double> lm = lip_field(mix, space);
            for (std::size_t x = 0; x < n; ++x)
                interp.worst_residual = std::max(
                    interp.worst_residual,
                    lm[x] - (star_max(one_minus, x) * lf[x] + star_max(chi, x) * lg[x] +
                             lchi[x] * fg_abs[x]));
        }

        // chain rule: per-node bracket with exact mean-value quotients of a
        // smooth monotone phi
        {
            auto phi = [](double r) { return std::tanh(r) + 0.5 * r; };
            std::vector<double> pf(n);
            for (std::size_t x = 0; x < n; ++x) pf[x] = phi(f[x]);
            const std::vector<double> lpf = lip_field(pf, space);
            for (std::size_t x = 0; x < n; ++x) {
                double lo = kInf, hi = 0.0;
                for (int u : space.neighbors()[x]) {
                    const double df = f[x] - f[(std::size_t)u];
                    if (std::abs(df) < 1e-14) continue;
                    const double quot = std::abs((pf[x] - pf[(std::size_t)u]) / df);
                    lo = std::min(lo, quot);
                    hi = std::max(hi, quot);
                }
                if (!is_finite(lo)) continue;
                chain.worst_residual = std::max(chain.worst_residual, lpf[x] - hi * lf[x]);
                chain.worst_residual = std::max(chain.worst_residual, lo * lf[x] - lpf[x] -
                                                                           1e-12);
            }
        }

        // normal contraction, per edge, with an odd zeta (0 <= zeta' <= 1):
        // psi(|d ftilde|/d) + psi(|d gtilde|/d) <= psi(|df|/d) + psi(|dg|/d)
        {
            const double lam = unit(rng);
            auto zeta = [lam](double r) { return lam * std::tanh(r); };
            auto psi = [](double r) { return r * r; };
            std::vector<double> ft(n), gt(n);
            for (std::size_t x = 0; x < n; ++x) {
                ft[x] = f[x] + zeta(g[x] - f[x]);
                gt[x] = g[x] + zeta(f[x] - g[x]);
            }
            for (auto [a, b] : space.edges()) {
                const double d = space.dist(a, b);
                const double lhs = psi(std::abs(ft[(std::size_t)a] - ft[(std::size_t)b]) / d) +
                                   psi(std::abs(gt[(std::size_t)a] - gt[(std::size_t)b]) / d);
                const double rhs = psi(std::abs(f[(std::size_t)a] - f[(std::size_t)b]) / d) +
                                   psi(std::abs(g[(std::size_t)a] - g[(std::size_t)b]) / d);
                contraction.worst_residual = std::max(contraction.worst_residual, lhs - rhs);
            }
        }
    }

    const double tol = 1e-9;
    for (RuleCheck* r : {&sublinear, &product, &interp, &chain, &contraction})
        r->pass = r->worst_residual <= tol;
    rep.rules = {sublinear, product, interp, chain, contraction};
    return rep;
}

namespace {

WeakGradientSolution wug_from_energy(const ModulusSolution& sol) {
    WeakGradientSolution w;
    w.value = sol.value;
    w.density = sol.density;
    w.achieved_gap = sol.achieved_gap;
    w.converged = sol.converged;
    return w;
}

} // namespace

WeakGradientSolution minimal_wug(const std::vector<double>& f, const std::vector<Arc>& family,
                                 const DiscreteSpace& space, double p) {
    require_exponent(p);
    const std::size_t n = space.size();
    std::vector<std::vector<double>> rows;
    std::vector<double> bounds;
    rows.reserve(family.size());
    for (const Arc& a : family) {
        const double gap = std::abs(f[(std::size_t)a.last()] - f[(std::size_t)a.first()]);
        rows.push_back(arc_measure(a, n));
        bounds.push_back(gap);
    }
    return wug_from_energy(constrained_p_energy(rows, bounds, space.measure(), p));
}

WeakGradientSolution minimal_wug_conformal(const std::vector<double>& f,
                                           const std::vector<Arc>& family,
                                           const DiscreteSpace& space,
                                           const std::vector<double>& g_conf, double p) {
    require_exponent(p);
    const std::size_t n = space.size();
    ConformalWeight::from(g_conf); // validates positivity
    std::vector<std::vector<double>> rows;
    std::vector<double> bounds;
    for (const Arc& a : family) {
        std::vector<double> row = arc_measure(a, n);
        for (std::size_t x = 0; x < n; ++x) row[x] *= g_conf[x];
        rows.push_back(std::move(row));
        bounds.push_back(std::abs(f[(std::size_t)a.last()] - f[(std::size_t)a.first()]));
    }
    std::vector<double> measure(n);
    for (std::size_t x = 0; x < n; ++x)
        measure[x] = space.measure(x) * std::pow(g_conf[x], p);
    return wug_from_energy(constrained_p_energy(rows, bounds, measure, p));
}

double dual_cheeger_primal(const std::vector<double>& h, const DiscreteSpace& space, double p,
                           DualEnergyForm form) {
    require_exponent(p);
    const double q = p / (p - 1.0);
    const std::size_t n = space.size();
    const std::vector<int> label = component_labels(space);
    const int comps = 1 + *std::max_element(label.begin(), label.end());
    if (!componentwise_zero_mean(h, space, label, comps)) return kInf;

    // Variables (f, s): maximize sum m h f - (1/p) sum m s^p, i.e. minimize the
    // negation, under per-edge slope rows. PreCheeger bounds both endpoint
    // slopes by s at each node; Potential uses the trapezoid average.
    const std::size_t nvar = 2 * n;
    std::vector<SeparableTerm> terms(nvar);
    for (std::size_t x = 0; x < n; ++x) {
        terms[x] = SeparableTerm{SeparableTerm::Kind::Linear, -space.measure(x) * h[x], 0.0};
        terms[n + x] = SeparableTerm{SeparableTerm::Kind::Power, space.measure(x) / p, p};
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    auto add_row = [&](std::size_t fu, std::size_t fv, double dfu, double dfv, std::size_t su,
                       double cu, std::size_t sv, double cv) {
        std::vector<double> r(nvar, 0.0);
        r[fu] += dfu;
        r[fv] += dfv;
        r[n + su] -= cu;
        if (cv != 0.0) r[n + sv] -= cv;
        rows.push_back(std::move(r));
        rhs.push_back(0.0);
    };
    for (auto [a, b] : space.edges()) {
        const auto u = (std::size_t)a, v = (std::size_t)b;
        const double d = space.dist(a, b);
        if (form == DualEnergyForm::PreCheeger) {
            add_row(u, v, 1.0, -1.0, u, d, v, 0.0);
            add_row(u, v, -1.0, 1.0, u, d, v, 0.0);
            add_row(u, v, 1.0, -1.0, v, d, u, 0.0);
            add_row(u, v, -1.0, 1.0, v, d, u, 0.0);
        } else {
            add_row(u, v, 1.0, -1.0, u, d / 2.0, v, d / 2.0);
            add_row(u, v, -1.0, 1.0, u, d / 2.0, v, d / 2.0);
        }
    }
    const std::size_t m_struct = rows.size();
    Mat a_ub(m_struct + n, nvar, 0.0);
    std::vector<double> b_ub(m_struct + n, 0.0);
    for (std::size_t r = 0; r < m_struct; ++r)
        for (std::size_t j = 0; j < nvar; ++j) a_ub(r, j) = rows[r][j];
    for (std::size_t x = 0; x < n; ++x) a_ub(m_struct + x, n + x) = -1.0; // s >= 0

    Mat a_eq((std::size_t)comps, nvar, 0.0);
    std::vector<double> b_eq((std::size_t)comps, 0.0);
    for (std::size_t x = 0; x < n; ++x) a_eq((std::size_t)label[x], x) = space.measure(x);

    std::vector<double> x0(nvar, 0.0);
    for (std::size_t x = 0; x < n; ++x) x0[n + x] = 1.0;

    BarrierOptions opts;
    opts.tol_gap = 1e-11;
    BarrierResult res = barrier_minimize(terms, a_ub, b_ub, a_eq, b_eq, x0, opts);
    return q * std::max(-res.objective, 0.0);
}

namespace {

// Cheapest walk from a to b with at most max_edges edges under per-node costs
// (trapezoid edge weights); cycles are stripped from the reconstruction, which
// cannot raise the cost.
std::vector<int> hop_bounded_min_cost_path(const DiscreteSpace& space,
                                           const std::vector<double>& node_cost, int a, int b,
                                           int max_edges, double* cost_out) {
    const std::size_t n = space.size();
    std::vector<double> dist(n, kInf), next_dist(n, kInf);
    std::vector<std::vector<int>> parent((std::size_t)max_edges + 1,
                                         std::vector<int>((std::size_t)n, -1));
    dist[(std::size_t)a] = 0.0;
    double best = kInf;
    int best_hops = -1;
    if (a == b) best = 0.0;
    for (int hop = 1; hop <= max_edges; ++hop) {
        next_dist = dist;
        for (auto [u, v] : space.edges()) {
            const double w = space.dist(u, v) *
                             (node_cost[(std::size_t)u] + node_cost[(std::size_t)v]) / 2.0;
            if (is_finite(dist[(std::size_t)u]) && dist[(std::size_t)u] + w < next_dist[(std::size_t)v] - 1e-15) {
                next_dist[(std::size_t)v] = dist[(std::size_t)u] + w;
                parent[(std::size_t)hop][(std::size_t)v] = u;
            }
            if (is_finite(dist[(std::size_t)v]) && dist[(std::size_t)v] + w < next_dist[(std::size_t)u] - 1e-15) {
                next_dist[(std::size_t)u] = dist[(std::size_t)v] + w;
                parent[(std::size_t)hop][(std::size_t)u] = v;
            }
        }
        dist.swap(next_dist);
        if (dist[(std::size_t)b] < best - 1e-15) {
            best = dist[(std::size_t)b];
            best_hops = hop;
        }
    }
    if (cost_out) *cost_out = best;
    if (!is_finite(best) || best_hops < 0) return {};
    // walk back through the hop layers; a layer without an update means the
    // node was settled earlier, so scan down
    std::vector<int> rev{b};
    int cur = b, hop = best_hops;
    while (cur != a && hop > 0) {
        int par = -1;
        for (int k = hop; k > 0 && par < 0; --k)
            if (parent[(std::size_t)k][(std::size_t)cur] >= 0) {
                par = parent[(std::size_t)k][(std::size_t)cur];
                hop = k - 1;
            }
        if (par < 0) return {};
        rev.push_back(par);
        cur = par;
    }
    std::reverse(rev.begin(), rev.end());
    // strip repeated nodes (cycles cost nothing or more; removal only helps)
    std::vector<int> path;
    for (int v : rev) {
        auto it = std::find(path.begin(), path.end(), v);
        if (it != path.end())
            path.erase(it + 1, path.end());
        else
            path.push_back(v);
    }
    return path;
}

struct PlanSolveOutcome {
    PlanResult result;
    std::vector<std::size_t> src_rows, snk_rows;
};

PlanSolveOutcome solve_plan_family(const std::vector<Arc>& family, const DiscreteSpace& space,
                                   double q, const std::vector<double>& mu0,
                                   const std::vector<double>& mu1,
                                   const std::vector<int>& sources, const std::vector<int>& sinks,
                                   const DistMatrix& reach) {
    const std::size_t n = space.size();
    PlanProblem prob;
    prob.nu = Mat(family.size(), n, 0.0);
    for (std::size_t g = 0; g < family.size(); ++g) {
        const std::vector<double> nu = arc_measure(family[g], n);
        for (std::size_t x = 0; x < n; ++x) prob.nu(g, x) = nu[x];
    }
    prob.measure = space.measure();
    prob.q = q;

    PlanSolveOutcome out;
    for (int x : sources) out.src_rows.push_back((std::size_t)x);
    for (int x : sinks) out.snk_rows.push_back((std::size_t)x);
    prob.eq = Mat(out.src_rows.size() + out.snk_rows.size(), family.size(), 0.0);
    prob.eq_rhs.assign(out.src_rows.size() + out.snk_rows.size(), 0.0);
    for (std::size_t r = 0; r < out.src_rows.size(); ++r) {
        prob.eq_rhs[r] = mu0[out.src_rows[r]];
        for (std::size_t g = 0; g < family.size(); ++g)
            if ((std::size_t)family[g].first() == out.src_rows[r]) prob.eq(r, g) = 1.0;
    }
    for (std::size_t r = 0; r < out.snk_rows.size(); ++r) {
        prob.eq_rhs[out.src_rows.size() + r] = mu1[out.snk_rows[r]];
        for (std::size_t g = 0; g < family.size(); ++g)
            if ((std::size_t)family[g].last() == out.snk_rows[r])
                prob.eq(out.src_rows.size() + r, g) = 1.0;
    }

    // Product-coupling start when every charged pair is connected; otherwise a
    // feasible coupling spread with a uniform floor (the merit's penalty
    // restores exact feasibility).
    const double total = std::accumulate(mu0.begin(), mu0.end(), 0.0);
    std::vector<double> w0(family.size(), 0.0);
    bool product_ok = true;
    for (int a : sources)
        for (int b : sinks)
            if (reach((std::size_t)a, (std::size_t)b) != 0.0) product_ok = false;
    std::vector<std::size_t> pair_count(n * n, 0);
    for (const Arc& a : family)
        pair_count[(std::size_t)a.first() * n + (std::size_t)a.last()]++;
    if (product_ok) {
        for (std::size_t g = 0; g < family.size(); ++g) {
            const std::size_t a = (std::size_t)family[g].first(), b = (std::size_t)family[g].last();
            w0[g] = mu0[a] * mu1[b] / total / (double)pair_count[a * n + b];
        }
    } else {
        const KrPrimalResult feas = kr_primal(mu0, mu1, reach);
        for (std::size_t g = 0; g < family.size(); ++g) {
            const std::size_t a = (std::size_t)family[g].first(), b = (std::size_t)family[g].last();
            w0[g] = feas.coupling(a, b) / (double)pair_count[a * n + b] + 1e-8 * total;
        }
    }
    for (double& v : w0) v = std::max(v, 1e-12 * total);

    BarrierOptions opts;
    opts.tol_gap = 1e-11 * (double)family.size();
    out.result = plan_minimize(prob, w0, opts);
    return out;
}

} // namespace

PlansDualResult dual_cheeger_plans(const std::vector<double>& h, const DiscreteSpace& space,
                                   double p, int max_edges) {
    require_exponent(p);
    const double q = p / (p - 1.0);
    const std::size_t n = space.size();
    if (max_edges < 0) max_edges = (int)n - 1;

    PlansDualResult out;
    std::vector<double> mu0(n, 0.0), mu1(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        mu0[x] = std::max(h[x], 0.0) * space.measure(x);
        mu1[x] = std::max(-h[x], 0.0) * space.measure(x);
    }
    std::vector<int> sources, sinks;
    for (std::size_t x = 0; x < n; ++x) {
        if (mu0[x] > 0.0) sources.push_back((int)x);
        if (mu1[x] > 0.0) sinks.push_back((int)x);
    }
    if (sources.empty() && sinks.empty()) return out; // h = 0

    // Hop-limited reachability decides feasibility before any solve.
    DistMatrix reach(n);
    {
        DistMatrix hops(n);
        for (std::size_t i = 0; i < n; ++i) hops(i, i) = 0.0;
        for (auto [a, b] : space.edges())
            hops((std::size_t)a, (std::size_t)b) = hops((std::size_t)b, (std::size_t)a) = 1.0;
        hops = floyd_warshall(hops);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                reach(i, j) = (is_finite(hops(i, j)) && hops(i, j) <= (double)max_edges) ? 0.0 : kInf;
    }
    if (!transport_feasible(mu0, mu1, reach)) {
        out.value = kInf;
        out.finite = false;
        return out;
    }

    auto keep = [&](std::vector<Arc> arcs) {
        std::vector<Arc> pruned;
        for (Arc& a : arcs)
            if (!a.constant() && mu0[(std::size_t)a.first()] > 0.0 &&
                mu1[(std::size_t)a.last()] > 0.0)
                pruned.push_back(std::move(a));
        return pruned;
    };

    std::vector<Arc> family;
    bool generate_columns = false;
    try {
        family = keep(simple_paths(space, sources, sinks, max_edges, 100000));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::FamilyTooLarge) throw;
        generate_columns = true;
    }

    if (!generate_columns) {
        if (family.empty()) {
            out.value = kInf;
            out.finite = false;
            return out;
        }
        const PlanSolveOutcome sol = solve_plan_family(family, space, q, mu0, mu1, sources, sinks, reach);
        out.value = q * sol.result.objective; // objective carries the 1/q factor
        out.plan = DynamicPlan{family, sol.result.weights};
        return out;
    }

    // Restricted master with shortest-path pricing: start from one cheapest
    // path per charged pair, then add columns whose reduced cost
    // (path integral of h_pi^{q-1} plus the endpoint multipliers) is negative.
    std::set<std::vector<int>> have;
    std::vector<double> unit(n, 1.0);
    for (int a : sources)
        for (int b : sinks) {
            if (reach((std::size_t)a, (std::size_t)b) != 0.0) continue;
            const std::vector<int> path =
                hop_bounded_min_cost_path(space, unit, a, b, max_edges, nullptr);
            if (!path.empty() && have.insert(path).second) family.emplace_back(path, space);
        }
    if (family.empty()) {
        out.value = kInf;
        out.finite = false;
        return out;
    }

    PlanSolveOutcome sol;
    for (int round = 0; round < 60; ++round) {
        sol = solve_plan_family(family, space, q, mu0, mu1, sources, sinks, reach);
        std::vector<double> node_cost(n, 0.0);
        double cost_scale = 1e-12;
        for (std::size_t x = 0; x < n; ++x) {
            node_cost[x] = std::pow(std::max(sol.result.barycenter_density[x], 0.0), q - 1.0);
            cost_scale = std::max(cost_scale, node_cost[x]);
        }
        bool added = false;
        for (std::size_t ia = 0; ia < sol.src_rows.size(); ++ia)
            for (std::size_t ib = 0; ib < sol.snk_rows.size(); ++ib) {
                const int a = (int)sol.src_rows[ia], b = (int)sol.snk_rows[ib];
                if (reach((std::size_t)a, (std::size_t)b) != 0.0) continue;
                double path_cost = kInf;
                const std::vector<int> path =
                    hop_bounded_min_cost_path(space, node_cost, a, b, max_edges, &path_cost);
                if (path.empty()) continue;
                const double reduced = path_cost + sol.result.eq_multipliers[ia] +
                                       sol.result.eq_multipliers[sol.src_rows.size() + ib];
                if (reduced < -1e-10 * (1.0 + cost_scale) && have.insert(path).second) {
                    family.emplace_back(path, space);
                    added = true;
                }
            }
        if (!added) break;
    }
    out.value = q * sol.result.objective;
    out.plan = DynamicPlan{family, sol.result.weights};
    return out;
}

namespace {

struct ConformalObjective {
    const DiscreteSpace& space;
    const std::vector<double>& mu0;
    const std::vector<double>& mu1;
    double p;

    double eval(const std::vector<double>& g, std::vector<double>* model_coeff) const {
        const ConformalWeight w = ConformalWeight::from(g);
        const DistMatrix dg = conformal_distance(space, w);
        const KrPrimalResult kr = kr_primal(mu0, mu1, dg);
        if (!kr.finite) {
            if (model_coeff) model_coeff->assign(space.size(), 0.0);
            return -kInf;
        }
        double penalty = 0.0;
        for (std::size_t x = 0; x < space.size(); ++x)
            penalty += space.measure(x) * std::pow(g[x], p) / p;
        if (model_coeff) {
            model_coeff->assign(space.size(), 0.0);
            // d K / d g(x): optimal coupling mass times the trapezoid incidence
            // of the shortest paths it rides on.
            WeightedGraph graph(space.size());
            for (auto [a, b] : space.edges()) {
                const double wgt = space.dist(a, b) * (g[(std::size_t)a] + g[(std::size_t)b]) / 2.0;
                graph[(std::size_t)a].push_back({b, wgt});
                graph[(std::size_t)b].push_back({a, wgt});
            }
            for (std::size_t a = 0; a < space.size(); ++a) {
                bool any = false;
                for (std::size_t b = 0; b < space.size(); ++b)
                    if (kr.coupling(a, b) > 0.0 && a != b) any = true;
                if (!any) continue;
                const ShortestPathTree tree = dijkstra(graph, {(int)a});
                for (std::size_t b = 0; b < space.size(); ++b) {
                    const double mass = kr.coupling(a, b);
                    if (mass <= 0.0 || a == b) continue;
                    const std::vector<int> path = reconstruct_path(tree, (int)b);
                    for (std::size_t j = 1; j < path.size(); ++j) {
                        const double d = space.dist(path[j - 1], path[j]);
                        (*model_coeff)[(std::size_t)path[j - 1]] += mass * d / 2.0;
                        (*model_coeff)[(std::size_t)path[j]] += mass * d / 2.0;
                    }
                }
            }
        }
        return kr.value - penalty;
    }
};

} // namespace

ConformalDualResult dual_cheeger_conformal(const std::vector<double>& h, const DiscreteSpace& space,
                                           double p, int starts, std::uint64_t seed) {
    require_exponent(p);
    const double q = p / (p - 1.0);
    const std::size_t n = space.size();
    constexpr double kGFloor = 1e-6;

    ConformalDualResult out;
    std::vector<double> mu0(n, 0.0), mu1(n, 0.0);
    bool zero = true;
    for (std::size_t x = 0; x < n; ++x) {
        mu0[x] = std::max(h[x], 0.0) * space.measure(x);
        mu1[x] = std::max(-h[x], 0.0) * space.measure(x);
        if (h[x] != 0.0) zero = false;
    }
    if (zero) {
        out.g.assign(n, kGFloor);
        return out;
    }

    const ConformalObjective obj{space, mu0, mu1, p};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.2, 1.5);

    if (obj.eval(std::vector<double>(n, 1.0), nullptr) == -kInf) {
        out.value = kInf; // charged nodes in different components
        out.g.assign(n, kGFloor);
        return out;
    }

    // K(g) is a finite minimum of linear functions of g, so linear majorant
    // cuts from exact KR solves drive a Kelley scheme: the bundle master is an
    // upper bound, the evaluations are lower bounds, and the loop closes the
    // certified gap. The seeded starts plant the initial bundle.
    std::vector<std::vector<double>> cuts;
    double best_val = -kInf;
    std::vector<double> best_g(n, 1.0);
    auto add_eval = [&](const std::vector<double>& g) {
        std::vector<double> coeff;
        const double val = obj.eval(g, &coeff);
        cuts.push_back(coeff);
        if (val > best_val) {
            best_val = val;
            best_g = g;
        }
        return val;
    };
    add_eval(std::vector<double>(n, 1.0));
    for (int s = 1; s < starts; ++s) {
        std::vector<double> g(n);
        for (double& v : g) v = unif(rng);
        add_eval(g);
    }

    for (int it = 0; it < 200; ++it) {
        ++out.outer_iterations;
        // master: max t - (1/p) sum m g^p  s.t.  t <= c_k . g, g >= floor
        const std::size_t nvar = n + 1; // (g, t)
        std::vector<SeparableTerm> terms(nvar);
        for (std::size_t x = 0; x < n; ++x)
            terms[x] = SeparableTerm{SeparableTerm::Kind::Power, space.measure(x) / p, p};
        terms[n] = SeparableTerm{SeparableTerm::Kind::Linear, -1.0, 0.0};

        Mat a_ub(cuts.size() + n, nvar, 0.0);
        std::vector<double> b_ub(cuts.size() + n, 0.0);
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            a_ub(k, n) = 1.0;
            for (std::size_t x = 0; x < n; ++x) a_ub(k, x) = -cuts[k][x];
        }
        for (std::size_t x = 0; x < n; ++x) {
            a_ub(cuts.size() + x, x) = -1.0;
            b_ub[cuts.size() + x] = -kGFloor;
        }
        std::vector<double> x0(nvar, 1.0);
        double tmin = kInf;
        for (const auto& c : cuts) {
            double acc = 0.0;
            for (std::size_t x = 0; x < n; ++x) acc += c[x];
            tmin = std::min(tmin, acc);
        }
        x0[n] = tmin - 1.0;

        BarrierOptions opts;
        opts.tol_gap = 1e-12;
        const BarrierResult master = barrier_minimize(terms, a_ub, b_ub, Mat(0, nvar), {}, x0, opts);
        const double model_value = -master.objective;
        std::vector<double> g(master.x.begin(), master.x.begin() + (long)n);
        for (double& v : g) v = std::max(v, kGFloor);
        add_eval(g);
        if (model_value - best_val <= 1e-10 * (1.0 + std::abs(best_val))) break;
    }
    out.value = q * std::max(best_val, 0.0);
    out.g = best_g;
    return out;
}

TripleReport triple_agreement(const std::vector<double>& h, const DiscreteSpace& space, double p) {
    TripleReport rep;
    // independent inputs, no shared mutable state: the three branches run
    // concurrently and merge deterministically
    auto primal_task = std::async(std::launch::async, [&] {
        return dual_cheeger_primal(h, space, p, DualEnergyForm::Potential);
    });
    auto plans_task = std::async(std::launch::async, [&] { return dual_cheeger_plans(h, space, p); });
    auto conformal_task =
        std::async(std::launch::async, [&] { return dual_cheeger_conformal(h, space, p); });
    rep.primal_pre = dual_cheeger_primal(h, space, p, DualEnergyForm::PreCheeger);
    rep.primal = primal_task.get();
    rep.plans = plans_task.get().value;
    rep.conformal = conformal_task.get().value;
    if (std::isinf(rep.primal) || std::isinf(rep.plans)) {
        rep.finite = false;
        rep.max_pairwise_gap = (std::isinf(rep.primal) && std::isinf(rep.plans)) ? 0.0 : kInf;
        return rep;
    }
    const double scale = std::max({rep.primal, rep.plans, rep.conformal, 1e-12});
    rep.max_pairwise_gap = std::max({std::abs(rep.primal - rep.plans),
                                     std::abs(rep.primal - rep.conformal),
                                     std::abs(rep.plans - rep.conformal)}) /
                           scale;
    return rep;
}

namespace {

DiscreteSpace interval_space(int n_edges) {
    std::vector<std::string> names;
    std::vector<std::tuple<int, int, double>> edges;
    std::vector<double> measure;
    const double hstep = 1.0 / n_edges;
    for (int k = 0; k <= n_edges; ++k) {
        names.push_back("x" + std::to_string(k));
        measure.push_back((k == 0 || k == n_edges) ? hstep / 2.0 : hstep);
        if (k > 0) edges.emplace_back(k - 1, k, hstep);
    }
    return DiscreteSpace::from_graph(names, edges, measure);
}

std::vector<Arc> subinterval_paths(const DiscreteSpace& space) {
    const int n = (int)space.size();
    std::vector<Arc> out;
    out.reserve((std::size_t)n * (std::size_t)(n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::vector<int> nodes;
            for (int k = i; k <= j; ++k) nodes.push_back(k);
            out.emplace_back(std::move(nodes), space);
        }
    return out;
}

} // namespace

HwReport hw_refinement(const std::vector<int>& n_list, double (*f_fn)(double), double p) {
    require_exponent(p);
    HwReport rep;
    double prev_gap = kInf;
    for (int n_edges : n_list) {
        const DiscreteSpace space = interval_space(n_edges);
        std::vector<double> f(space.size());
        for (std::size_t k = 0; k < space.size(); ++k)
            f[k] = f_fn((double)k / (double)n_edges);
        const double pre = pre_cheeger(f, space, p);
        const WeakGradientSolution weak = minimal_wug(f, subinterval_paths(space), space, p);
        HwPoint pt;
        pt.n_edges = n_edges;
        pt.pre_energy = pre;
        pt.weak_energy = weak.value;
        pt.gap = pre - weak.value;
        if (pt.gap < -1e-9 * (1.0 + pre)) rep.weak_below_pre = false;
        if (pt.gap > prev_gap + 1e-9 * (1.0 + pre)) rep.gap_monotone = false;
        prev_gap = pt.gap;
        rep.points.push_back(pt);
    }
    return rep;
}

CalculusReport wug_calculus_suite(const DiscreteSpace& space, const std::vector<Arc>& family,
                                  double p, int samples, std::uint64_t seed) {
    CalculusReport rep;
    RuleCheck convexity{"feasible_set_convexity", 0.0, true};
    RuleCheck lipschitz{"lipschitz_composition", 0.0, true};
    RuleCheck conformal{"conformal_rescaling", 0.0, true};
    RuleCheck stability{"limit_stability", 0.0, true};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gpos(0.25, 2.0);
    const std::size_t n = space.size();

    auto feasible_residual = [&](const std::vector<double>& f, const std::vector<double>& g) {
        double worst = 0.0;
        for (const Arc& a : family) {
            const double need = std::abs(f[(std::size_t)a.last()] - f[(std::size_t)a.first()]);
            worst = std::max(worst, need - line_integral(g, a));
        }
        return worst;
    };

    for (int s = 0; s < samples; ++s) {
        std::vector<double> f(n);
        for (std::size_t x = 0; x < n; ++x) f[x] = unif(rng);

        const WeakGradientSolution base = minimal_wug(f, family, space, p);
        if (std::isinf(base.value)) continue;
        std::vector<double> g1 = base.density.empty() ? std::vector<double>(n, 0.0) : base.density;

        // (i) random convex combination of two feasible gradients stays feasible
        {
            std::vector<double> g2(n);
            for (std::size_t x = 0; x < n; ++x) g2[x] = g1[x] + unit(rng); // feasible by monotonicity
            const double lam = unit(rng);
            std::vector<double> mix(n);
            for (std::size_t x = 0; x < n; ++x) mix[x] = lam * g1[x] + (1.0 - lam) * g2[x];
            convexity.worst_residual =
                std::max(convexity.worst_residual, feasible_residual(f, mix) - 1e-8);
        }

        // (ii) 1-Lipschitz composition: scaled minimal gradient stays feasible
        // for phi(f) and bounds its energy
        {
            auto phi = [](double r) { return 0.5 * (r + std::log1p(std::exp(2.0 * (r - 0.2))) / 2.0); };
            // numerical Lipschitz bound of phi on the sample range
            double lip_phi = 0.0;
            for (double r = -1.0; r <= 1.0; r += 1e-3)
                lip_phi = std::max(lip_phi, std::abs((phi(r + 1e-6) - phi(r)) / 1e-6));
            std::vector<double> pf(n);
            for (std::size_t x = 0; x < n; ++x) pf[x] = phi(f[x]);
            const WeakGradientSolution composed = minimal_wug(pf, family, space, p);
            lipschitz.worst_residual = std::max(
                lipschitz.worst_residual,
                composed.value - std::pow(lip_phi, p) * base.value - 1e-8 * (1.0 + base.value));
        }

        // (iii) conformal rescaling: the reweighted program's minimizer is the
        // original divided by the weight, pointwise
        {
            std::vector<double> gw(n);
            for (std::size_t x = 0; x < n; ++x) gw[x] = gpos(rng);
            const WeakGradientSolution re = minimal_wug_conformal(f, family, space, gw, p);
            if (!std::isinf(re.value) && !base.density.empty() && !re.density.empty()) {
                for (std::size_t x = 0; x < n; ++x)
                    conformal.worst_residual = std::max(
                        conformal.worst_residual,
                        std::abs(re.density[x] - base.density[x] / gw[x]));
            }
        }

        // (iv) stability: minimal gradients of a converging sequence converge to
        // a feasible gradient of the limit
        {
            std::vector<double> noise(n);
            for (std::size_t x = 0; x < n; ++x) noise[x] = unif(rng);
            std::vector<double> fk(n);
            double resid = 0.0;
            for (int k = 1; k <= 3; ++k) {
                const double eps = std::pow(10.0, -2 * k);
                for (std::size_t x = 0; x < n; ++x) fk[x] = f[x] + eps * noise[x];
                const WeakGradientSolution wk = minimal_wug(fk, family, space, p);
                if (wk.density.empty()) continue;
                resid = feasible_residual(f, wk.density);
            }
            stability.worst_residual = std::max(stability.worst_residual, resid - 1e-4);
        }
    }

    convexity.pass = convexity.worst_residual <= 1e-8;
    lipschitz.pass = lipschitz.worst_residual <= 1e-6;
    conformal.pass = conformal.worst_residual <= 1e-6;
    stability.pass = stability.worst_residual <= 1e-8;
    rep.rules = {convexity, lipschitz, conformal, stability};
    return rep;
}

} // namespace mms
