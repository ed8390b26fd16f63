#include "mms/plans.hpp"

#include <algorithm>
#include <cmath>

#include "mms/solvers.hpp"

namespace mms {

namespace {

Mat family_measure_matrix(const std::vector<Arc>& family, const DiscreteSpace& space, bool tilde) {
    Mat nu(family.size(), space.size(), 0.0);
    for (std::size_t g = 0; g < family.size(); ++g) {
        std::vector<double> row = arc_measure(family[g], space.size());
        if (tilde) {
            row[(std::size_t)family[g].first()] += 1.0;
            row[(std::size_t)family[g].last()] += 1.0;
        }
        for (std::size_t x = 0; x < space.size(); ++x) nu(g, x) = row[x];
    }
    return nu;
}

} // namespace

Barycenter barycenter(const DynamicPlan& plan, const DiscreteSpace& space) {
    Barycenter b;
    b.mass.assign(space.size(), 0.0);
    for (std::size_t g = 0; g < plan.support.size(); ++g) {
        const std::vector<double> nu = arc_measure(plan.support[g], space.size());
        for (std::size_t x = 0; x < space.size(); ++x) b.mass[x] += plan.weights[g] * nu[x];
    }
    b.density.assign(space.size(), 0.0);
    for (std::size_t x = 0; x < space.size(); ++x) b.density[x] = b.mass[x] / space.measure(x);
    return b;
}

double barycentric_entropy(const DynamicPlan& plan, const DiscreteSpace& space, double q) {
    require_exponent(q);
    const Barycenter b = barycenter(plan, space);
    double acc = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x)
        acc += space.measure(x) * std::pow(b.density[x], q);
    return std::pow(acc, 1.0 / q);
}

ContentResult content_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                        bool tilde) {
    require_exponent(p);
    const double q = p / (p - 1.0);
    ContentResult out;
    if (family.empty()) return out;
    if (!tilde) {
        for (const Arc& a : family)
            if (a.constant()) {
                out.value = out.value_pow_p = kInf;
                return out;
            }
    }

    PlanProblem prob;
    prob.nu = family_measure_matrix(family, space, tilde);
    prob.measure = space.measure();
    prob.q = q;
    prob.reward.assign(family.size(), 1.0);
    prob.eq = Mat(0, family.size());

    BarrierOptions opts;
    opts.tol_gap = 1e-11 * (double)family.size();
    PlanResult res = plan_minimize(prob, std::vector<double>(family.size(), 0.5), opts);

    // sup sum w - (1/q) br^q = -objective;  Cont^p = p * sup.
    const double sup_value = -res.objective;
    out.value_pow_p = p * sup_value;
    out.value = std::pow(std::max(out.value_pow_p, 0.0), 1.0 / p);
    out.optimal_plan = DynamicPlan{family, res.weights};
    out.plan_mass = 0.0;
    for (double w : res.weights) out.plan_mass += w;
    double brq_q = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x) {
        double y = 0.0;
        for (std::size_t g = 0; g < family.size(); ++g) y += prob.nu(g, x) * res.weights[g];
        brq_q += std::pow(space.measure(x), 1.0 - q) * std::pow(y, q);
    }
    out.entropy_pow_q = brq_q;

    const double scale = std::max({out.value_pow_p, out.plan_mass, brq_q, 1e-12});
    out.optimality_residual =
        std::max(std::abs(out.plan_mass - out.value_pow_p), std::abs(brq_q - out.value_pow_p)) / scale;
    out.achieved_gap = res.mu_final * (double)family.size() / std::max(sup_value, 1e-12);
    out.converged = res.converged;
    return out;
}

double content_ratio_form(const std::vector<Arc>& family, const DiscreteSpace& space, double p) {
    require_exponent(p);
    const double q = p / (p - 1.0);
    if (family.empty()) return 0.0;
    for (const Arc& a : family)
        if (a.constant()) return kInf;

    PlanProblem prob;
    prob.nu = family_measure_matrix(family, space, false);
    prob.measure = space.measure();
    prob.q = q;
    prob.eq = Mat(1, family.size(), 1.0);
    prob.eq_rhs = {1.0};

    BarrierOptions opts;
    opts.tol_gap = 1e-12 * (double)family.size();
    PlanResult res =
        plan_minimize(prob, std::vector<double>(family.size(), 1.0 / (double)family.size()), opts);

    // objective = (1/q) br_q^q at the simplex minimizer
    const double brq = std::pow(std::max(res.objective * q, 0.0), 1.0 / q);
    if (brq <= 0.0) return kInf;
    return 1.0 / brq;
}

DualityReport duality_certificate(const std::vector<Arc>& family, const DiscreteSpace& space,
                                  double p, bool tilde) {
    DualityReport rep;
    rep.modulus = tilde ? modulus_tilde_p(family, space, p) : modulus_p(family, space, p);
    rep.content = content_p(family, space, p, tilde);
    rep.primal = rep.modulus.value;
    rep.dual = rep.content.value_pow_p;
    if (std::isinf(rep.primal) || std::isinf(rep.dual)) {
        rep.infinite = std::isinf(rep.primal) && std::isinf(rep.dual);
        rep.relative_gap = rep.infinite ? 0.0 : kInf;
        return rep;
    }
    rep.relative_gap = std::abs(rep.primal - rep.dual) / std::max({rep.primal, rep.dual, 1e-12});

    // Complementary slackness: arcs carrying plan mass meet their constraint
    // with equality for the extremal density.
    if (!rep.modulus.density.empty()) {
        double mass_scale = 0.0;
        for (double w : rep.content.optimal_plan.weights) mass_scale = std::max(mass_scale, w);
        double worst = 0.0;
        for (std::size_t g = 0; g < family.size(); ++g) {
            if (rep.content.optimal_plan.weights[g] <= 1e-6 * mass_scale) continue;
            double integral = line_integral(rep.modulus.density, family[g]);
            if (tilde)
                integral += rep.modulus.density[(std::size_t)family[g].first()] +
                            rep.modulus.density[(std::size_t)family[g].last()];
            worst = std::max(worst, std::abs(integral - 1.0));
        }
        rep.slackness_residual = worst;
    }
    return rep;
}

TqReport tq_membership(const DynamicPlan& plan, const DiscreteSpace& space, double q) {
    require_exponent(q);
    TqReport rep;
    rep.entropy = barycentric_entropy(plan, space, q);
    std::vector<double> init(space.size(), 0.0), fin(space.size(), 0.0);
    for (std::size_t g = 0; g < plan.support.size(); ++g) {
        init[(std::size_t)plan.support[g].first()] += plan.weights[g];
        fin[(std::size_t)plan.support[g].last()] += plan.weights[g];
    }
    auto q_norm = [&](const std::vector<double>& mass) {
        double acc = 0.0;
        for (std::size_t x = 0; x < space.size(); ++x)
            acc += space.measure(x) * std::pow(mass[x] / space.measure(x), q);
        return std::pow(acc, 1.0 / q);
    };
    rep.initial_marginal_norm = q_norm(init);
    rep.final_marginal_norm = q_norm(fin);
    return rep;
}

} // namespace mms
