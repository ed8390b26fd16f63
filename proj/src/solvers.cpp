#include "mms/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mms {

namespace {

double term_value(const SeparableTerm& t, double x) {
    if (t.kind == SeparableTerm::Kind::Linear) return t.weight * x;
    return t.weight * std::pow(x, t.exponent);
}

double term_grad(const SeparableTerm& t, double x) {
    if (t.kind == SeparableTerm::Kind::Linear) return t.weight;
    return t.weight * t.exponent * std::pow(x, t.exponent - 1.0);
}

double term_hess(const SeparableTerm& t, double x) {
    if (t.kind == SeparableTerm::Kind::Linear) return 0.0;
    return t.weight * t.exponent * (t.exponent - 1.0) * std::pow(x, t.exponent - 2.0);
}

double objective_value(const std::vector<SeparableTerm>& terms, const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) acc += term_value(terms[i], x[i]);
    return acc;
}

} // namespace

BarrierResult barrier_minimize(const std::vector<SeparableTerm>& terms, const Mat& a_ub,
                               const std::vector<double>& b_ub, const Mat& a_eq,
                               const std::vector<double>& b_eq, std::vector<double> x0,
                               const BarrierOptions& opts) {
    const std::size_t n = terms.size();
    const std::size_t m_ub = a_ub.rows();
    const std::size_t m_eq = a_eq.rows();

    auto slacks = [&](const std::vector<double>& x) {
        std::vector<double> s(m_ub);
        for (std::size_t i = 0; i < m_ub; ++i) {
            double acc = b_ub[i];
            for (std::size_t j = 0; j < n; ++j) acc -= a_ub(i, j) * x[j];
            s[i] = acc;
        }
        return s;
    };

    std::vector<double> x = std::move(x0);
    {
        std::vector<double> s = slacks(x);
        for (double v : s)
            if (!(v > 0.0)) throw std::runtime_error("barrier start is not strictly feasible");
    }

    BarrierResult res;
    res.x = x;
    double mu = opts.mu0;
    const double mu_target =
        std::max(opts.tol_gap / std::max<std::size_t>(m_ub, 1), 1e-300);
    int total_newton = 0;
    std::vector<double> eq_mult(m_eq, 0.0);

    while (true) {
        for (int it = 0; it < opts.max_newton_per_stage; ++it) {
            if (total_newton >= opts.max_total_newton) break;
            ++total_newton;

            std::vector<double> s = slacks(x);
            std::vector<double> grad(n, 0.0);
            Mat h(n, n, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                grad[j] = term_grad(terms[j], x[j]);
                h(j, j) += term_hess(terms[j], x[j]);
            }
            for (std::size_t i = 0; i < m_ub; ++i) {
                const double inv = 1.0 / s[i];
                for (std::size_t j = 0; j < n; ++j) {
                    const double aij = a_ub(i, j);
                    if (aij == 0.0) continue;
                    grad[j] += mu * aij * inv;
                    for (std::size_t k = j; k < n; ++k) {
                        const double aik = a_ub(i, k);
                        if (aik == 0.0) continue;
                        h(j, k) += mu * aij * aik * inv * inv;
                    }
                }
            }
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < j; ++k) h(j, k) = h(k, j);

            // KKT system for the equality-constrained Newton step.
            const std::size_t dim = n + m_eq;
            Mat kkt(dim, dim, 0.0);
            std::vector<double> rhs(dim, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                rhs[j] = -grad[j];
                for (std::size_t k = 0; k < n; ++k) kkt(j, k) = h(j, k);
            }
            for (std::size_t e = 0; e < m_eq; ++e) {
                double viol = -b_eq[e];
                for (std::size_t j = 0; j < n; ++j) {
                    kkt(n + e, j) = a_eq(e, j);
                    kkt(j, n + e) = a_eq(e, j);
                    viol += a_eq(e, j) * x[j];
                }
                rhs[n + e] = -viol;
            }

            std::vector<double> step;
            try {
                LdltSolver f(kkt);
                step = f.solve(rhs);
            } catch (const std::exception&) {
                break;
            }
            std::vector<double> dx(step.begin(), step.begin() + (long)n);
            for (std::size_t e = 0; e < m_eq; ++e) eq_mult[e] = step[n + e];

            const double decrement = -dot(dx, grad);

            // Largest step keeping every slack strictly positive.
            double alpha = 1.0;
            for (std::size_t i = 0; i < m_ub; ++i) {
                double adx = 0.0;
                for (std::size_t j = 0; j < n; ++j) adx += a_ub(i, j) * dx[j];
                if (adx > 0.0) alpha = std::min(alpha, 0.99 * s[i] / adx);
            }
            if (!(alpha > 0.0)) break;

            auto barrier_val = [&](const std::vector<double>& xx) {
                std::vector<double> ss = slacks(xx);
                double acc = objective_value(terms, xx);
                for (double v : ss) {
                    if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
                    acc -= mu * std::log(v);
                }
                return acc;
            };

            const double base = barrier_val(x);
            std::vector<double> trial(n);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + alpha * dx[j];
                const double val = barrier_val(trial);
                if (val <= base - 1e-4 * alpha * std::max(decrement, 0.0) + 1e-14 * (1.0 + std::abs(base))) {
                    x = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (norm_inf(dx) < opts.newton_tol * (1.0 + norm_inf(x))) break;
        }

        if (mu <= mu_target || total_newton >= opts.max_total_newton) {
            std::vector<double> s = slacks(x);
            res.x = x;
            res.objective = objective_value(terms, x);
            res.ineq_multipliers.assign(m_ub, 0.0);
            for (std::size_t i = 0; i < m_ub; ++i) res.ineq_multipliers[i] = mu / s[i];
            res.eq_multipliers = eq_mult;
            res.mu_final = mu;
            res.newton_iterations = total_newton;
            res.converged = mu <= mu_target;
            return res;
        }
        mu = std::max(mu * opts.mu_shrink, mu_target);
    }
}

PlanResult plan_minimize(const PlanProblem& problem, std::vector<double> w0,
                         const BarrierOptions& opts) {
    const std::size_t paths = problem.nu.rows();
    const std::size_t n = problem.nu.cols();
    const std::size_t m_eq = problem.eq.rows();
    const double q = problem.q;

    for (double v : w0)
        if (!(v > 0.0)) throw std::runtime_error("plan start must be strictly positive");

    auto barycenter = [&](const std::vector<double>& w) {
        std::vector<double> y(n, 0.0);
        for (std::size_t g = 0; g < paths; ++g) {
            const double wg = w[g];
            if (wg == 0.0) continue;
            for (std::size_t x = 0; x < n; ++x) y[x] += problem.nu(g, x) * wg;
        }
        return y;
    };
    auto psi_value = [&](const std::vector<double>& y) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            acc += std::pow(problem.measure[x], 1.0 - q) * std::pow(y[x], q) / q;
        return acc;
    };
    auto objective = [&](const std::vector<double>& w, const std::vector<double>& y) {
        double acc = psi_value(y);
        if (!problem.reward.empty())
            for (std::size_t g = 0; g < paths; ++g) acc -= problem.reward[g] * w[g];
        return acc;
    };

    std::vector<double> w = std::move(w0);
    std::vector<double> eq_mult(m_eq, 0.0);
    double mu = opts.mu0;
    const double mu_target = std::max(opts.tol_gap / std::max<std::size_t>(paths, 1), 1e-300);
    int total_newton = 0;

    PlanResult res;
    while (true) {
        for (int it = 0; it < opts.max_newton_per_stage; ++it) {
            if (total_newton >= opts.max_total_newton) break;
            ++total_newton;

            std::vector<double> y = barycenter(w);
            std::vector<double> psi_g(n, 0.0), psi_h(n, 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                const double mw = std::pow(problem.measure[x], 1.0 - q);
                psi_g[x] = mw * std::pow(y[x], q - 1.0);
                psi_h[x] = mw * (q - 1.0) * std::pow(y[x], q - 2.0);
                if (!std::isfinite(psi_h[x])) psi_h[x] = 0.0; // uncovered node, y = 0
            }

            std::vector<double> grad(paths, 0.0);
            for (std::size_t g = 0; g < paths; ++g) {
                double acc = 0.0;
                for (std::size_t x = 0; x < n; ++x) acc += problem.nu(g, x) * psi_g[x];
                if (!problem.reward.empty()) acc -= problem.reward[g];
                grad[g] = acc - mu / w[g];
            }

            // H = diag(mu / w^2) + N diag(psi_h) N^T, solved via Woodbury.
            std::vector<double> dvec(paths);
            for (std::size_t g = 0; g < paths; ++g) dvec[g] = mu / (w[g] * w[g]);

            std::vector<std::size_t> active_cols;
            for (std::size_t x = 0; x < n; ++x)
                if (psi_h[x] > 0.0) active_cols.push_back(x);
            const std::size_t k = active_cols.size();

            auto apply_hinv = [&](const std::vector<double>& r) {
                // (D + N C N^T)^{-1} r with C = diag(psi_h) over active columns.
                std::vector<double> dinv_r(paths);
                for (std::size_t g = 0; g < paths; ++g) dinv_r[g] = r[g] / dvec[g];
                if (k == 0) return dinv_r;
                Mat inner(k, k, 0.0);
                std::vector<double> nt_dinv_r(k, 0.0);
                for (std::size_t a = 0; a < k; ++a) {
                    inner(a, a) = 1.0 / psi_h[active_cols[a]];
                    double acc = 0.0;
                    for (std::size_t g = 0; g < paths; ++g)
                        acc += problem.nu(g, active_cols[a]) * dinv_r[g];
                    nt_dinv_r[a] = acc;
                }
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = a; b < k; ++b) {
                        double acc = 0.0;
                        for (std::size_t g = 0; g < paths; ++g)
                            acc += problem.nu(g, active_cols[a]) * problem.nu(g, active_cols[b]) / dvec[g];
                        inner(a, b) += acc;
                        inner(b, a) = inner(a, b);
                    }
                LdltSolver f(inner);
                std::vector<double> z = f.solve(nt_dinv_r);
                std::vector<double> out = dinv_r;
                for (std::size_t g = 0; g < paths; ++g) {
                    double corr = 0.0;
                    for (std::size_t a = 0; a < k; ++a)
                        corr += problem.nu(g, active_cols[a]) * z[a];
                    out[g] -= corr / dvec[g];
                }
                return out;
            };

            std::vector<double> dw;
            if (m_eq == 0) {
                std::vector<double> neg_grad(paths);
                for (std::size_t g = 0; g < paths; ++g) neg_grad[g] = -grad[g];
                dw = apply_hinv(neg_grad);
            } else {
                // Schur complement on the equality block.
                std::vector<double> eq_viol(m_eq, 0.0);
                for (std::size_t e = 0; e < m_eq; ++e) {
                    double acc = -problem.eq_rhs[e];
                    for (std::size_t g = 0; g < paths; ++g) acc += problem.eq(e, g) * w[g];
                    eq_viol[e] = acc;
                }
                std::vector<double> neg_grad(paths);
                for (std::size_t g = 0; g < paths; ++g) neg_grad[g] = -grad[g];
                std::vector<double> hinv_g = apply_hinv(neg_grad);

                Mat schur(m_eq, m_eq, 0.0);
                std::vector<std::vector<double>> hinv_et(m_eq);
                for (std::size_t e = 0; e < m_eq; ++e) {
                    std::vector<double> row(paths, 0.0);
                    for (std::size_t g = 0; g < paths; ++g) row[g] = problem.eq(e, g);
                    hinv_et[e] = apply_hinv(row);
                }
                for (std::size_t e = 0; e < m_eq; ++e)
                    for (std::size_t f2 = 0; f2 < m_eq; ++f2) {
                        double acc = 0.0;
                        for (std::size_t g = 0; g < paths; ++g)
                            acc += problem.eq(e, g) * hinv_et[f2][g];
                        schur(e, f2) = acc;
                    }
                std::vector<double> rhs(m_eq, 0.0);
                for (std::size_t e = 0; e < m_eq; ++e) {
                    double acc = 0.0;
                    for (std::size_t g = 0; g < paths; ++g) acc += problem.eq(e, g) * hinv_g[g];
                    rhs[e] = acc + eq_viol[e];
                }
                LdltSolver f(schur);
                std::vector<double> nu_mult = f.solve(rhs);
                eq_mult = nu_mult;
                dw = hinv_g;
                for (std::size_t g = 0; g < paths; ++g) {
                    double corr = 0.0;
                    for (std::size_t e = 0; e < m_eq; ++e) corr += hinv_et[e][g] * nu_mult[e];
                    dw[g] -= corr;
                }
            }

            double alpha = 1.0;
            for (std::size_t g = 0; g < paths; ++g)
                if (dw[g] < 0.0) alpha = std::min(alpha, -0.99 * w[g] / dw[g]);
            if (!(alpha > 0.0)) break;

            // Exact-penalty merit: Newton's direction reduces the equality
            // violation linearly, so the l1 term never blocks it.
            double penalty = 10.0;
            for (double v : eq_mult) penalty = std::max(penalty, 10.0 * (1.0 + std::abs(v)));
            auto merit = [&](const std::vector<double>& ww) {
                std::vector<double> yy = barycenter(ww);
                double acc = objective(ww, yy);
                for (double v : ww) {
                    if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
                    acc -= mu * std::log(v);
                }
                for (std::size_t e = 0; e < m_eq; ++e) {
                    double resid = -problem.eq_rhs[e];
                    for (std::size_t g = 0; g < paths; ++g) resid += problem.eq(e, g) * ww[g];
                    acc += penalty * std::abs(resid);
                }
                return acc;
            };
            const double base = merit(w);
            const double decrement = -dot(dw, grad);
            std::vector<double> trial(paths);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t g = 0; g < paths; ++g) trial[g] = w[g] + alpha * dw[g];
                if (merit(trial) <=
                    base - 1e-4 * alpha * std::max(decrement, 0.0) + 1e-14 * (1.0 + std::abs(base))) {
                    w = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (norm_inf(dw) < opts.newton_tol * (1.0 + norm_inf(w))) break;
        }

        if (mu <= mu_target || total_newton >= opts.max_total_newton) {
            std::vector<double> y = barycenter(w);
            res.weights = w;
            res.objective = objective(w, y);
            res.barycenter_density.assign(n, 0.0);
            for (std::size_t x = 0; x < n; ++x) res.barycenter_density[x] = y[x] / problem.measure[x];
            res.eq_multipliers = eq_mult;
            res.mu_final = mu;
            res.newton_iterations = total_newton;
            res.converged = mu <= mu_target;
            return res;
        }
        mu = std::max(mu * opts.mu_shrink, mu_target);
    }
}

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_evals) {
    QuadratureResult out;
    int evals = 0;
    auto eval = [&](double x) {
        ++evals;
        return f(x);
    };

    struct Frame {
        double a, b, fa, fm, fb, whole;
        int depth;
    };

    const double fa = eval(a), fb = eval(b), fm = eval(0.5 * (a + b));
    auto simpson = [](double a_, double b_, double fa_, double fm_, double fb_) {
        return (b_ - a_) / 6.0 * (fa_ + 4.0 * fm_ + fb_);
    };

    std::vector<Frame> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 0}};
    double total = 0.0;
    bool ok = true;
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (evals + 2 > max_evals) {
            total += fr.whole;
            ok = false;
            continue;
        }
        const double m = 0.5 * (fr.a + fr.b);
        const double fl = eval(0.5 * (fr.a + m));
        const double fr_ = eval(0.5 * (m + fr.b));
        const double left = simpson(fr.a, m, fr.fa, fl, fr.fm);
        const double right = simpson(m, fr.b, fr.fm, fr_, fr.fb);
        const double delta = left + right - fr.whole;
        if (std::abs(delta) <= 15.0 * tol * (fr.b - fr.a) / (b - a) || fr.depth >= 48) {
            total += left + right + delta / 15.0;
        } else {
            stack.push_back({fr.a, m, fr.fa, fl, fr.fm, left, fr.depth + 1});
            stack.push_back({m, fr.b, fr.fm, fr_, fr.fb, right, fr.depth + 1});
        }
    }
    out.value = total;
    out.evaluations = evals;
    out.converged = ok;
    return out;
}

} // namespace mms
