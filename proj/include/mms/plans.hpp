#pragma once

#include <vector>

#include "mms/arcs.hpp"
#include "mms/modulus.hpp"
#include "mms/space.hpp"

namespace mms {

struct DynamicPlan {
    std::vector<Arc> support;
    std::vector<double> weights;
};

struct Barycenter {
    std::vector<double> mass;     // mu_pi per node
    std::vector<double> density;  // h_pi = mass / m
};

Barycenter barycenter(const DynamicPlan& plan, const DiscreteSpace& space);

/// L^q(m) norm of the barycenter density; 0 iff the plan sits on constant arcs.
double barycentric_entropy(const DynamicPlan& plan, const DiscreteSpace& space, double q);

struct ContentResult {
    double value = 0.0;            // Cont_p(Gamma); kInf with a constant arc present
    double value_pow_p = 0.0;      // Cont_p^p
    DynamicPlan optimal_plan;
    double plan_mass = 0.0;        // pi(Gamma)
    double entropy_pow_q = 0.0;    // br_q^q(pi)
    double optimality_residual = 0.0; // relative spread of pi(Gamma), Cont^p, br^q
    double achieved_gap = 0.0;
    bool converged = true;
};

/// Legendre form (1/p) Cont_p^p = sup_w sum w - (1/q) br_q^q over nonnegative
/// weights on the enumerated family.
ContentResult content_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                        bool tilde = false);

/// Independent ratio route: minimize br_q over the probability simplex; the
/// content is the reciprocal at the optimum.
double content_ratio_form(const std::vector<Arc>& family, const DiscreteSpace& space, double p);

struct DualityReport {
    double primal = 0.0;           // Mod_p (or tilde variant)
    double dual = 0.0;             // Cont_p^p (or tilde variant)
    double relative_gap = 0.0;
    double slackness_residual = 0.0; // worst |arc integral of f* - 1| on the plan support
    ModulusSolution modulus;
    ContentResult content;
    bool infinite = false;         // both sides forced to kInf by a constant arc
};

DualityReport duality_certificate(const std::vector<Arc>& family, const DiscreteSpace& space,
                                  double p, bool tilde = false);

struct TqReport {
    double entropy = 0.0;             // br_q(pi)
    double initial_marginal_norm = 0.0;
    double final_marginal_norm = 0.0;
};

TqReport tq_membership(const DynamicPlan& plan, const DiscreteSpace& space, double q);

} // namespace mms
