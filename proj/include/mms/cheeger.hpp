#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mms/arcs.hpp"
#include "mms/modulus.hpp"
#include "mms/plans.hpp"
#include "mms/space.hpp"

namespace mms {

/// Per-node asymptotic Lipschitz constant: max difference quotient over the
/// adjacency star; 0 at isolated nodes.
std::vector<double> lip_field(const std::vector<double>& f, const DiscreteSpace& space);

double pre_cheeger(const std::vector<double>& f, const DiscreteSpace& space, double p);

struct RuleCheck {
    std::string name;
    double worst_residual = 0.0;
    bool pass = true;
};

struct CalculusReport {
    std::vector<RuleCheck> rules;
    bool pass() const {
        for (const auto& r : rules)
            if (!r.pass) return false;
        return true;
    }
};

/// Sublinearity, star-localized product and interpolation rules, mean-value
/// chain-rule brackets and the per-edge normal contraction, on seeded samples.
CalculusReport lip_calculus_suite(const DiscreteSpace& space, int samples, std::uint64_t seed);

struct WeakGradientSolution {
    double value = 0.0;             // sum m g^p; kInf when unattainable
    std::vector<double> density;    // minimal g
    double achieved_gap = 0.0;
    bool converged = true;
};

/// Minimal T_q-style weak upper gradient over the enumerated family:
/// min sum m g^p subject to the arc integral of g dominating |f(b) - f(a)|.
WeakGradientSolution minimal_wug(const std::vector<double>& f, const std::vector<Arc>& family,
                                 const DiscreteSpace& space, double p);

/// Same program after the conformal change of variables: constraints use the
/// reweighted arc measure g_conf * nu_gamma and the objective measure m * g_conf^p.
WeakGradientSolution minimal_wug_conformal(const std::vector<double>& f,
                                           const std::vector<Arc>& family,
                                           const DiscreteSpace& space,
                                           const std::vector<double>& g_conf, double p);

enum class DualEnergyForm {
    PreCheeger, // sup_f sum m h f - (1/p) pCE_p(f), with the neighbor-max lip energy
    Potential,  // trapezoid-consistent potential form; exact partner of plans/conformal
};

/// q * sup of the chosen dual form; +infinity when h has nonzero mean on some
/// adjacency component.
double dual_cheeger_primal(const std::vector<double>& h, const DiscreteSpace& space, double p,
                           DualEnergyForm form = DualEnergyForm::PreCheeger);

struct PlansDualResult {
    double value = 0.0;  // D_q = inf br_q^q over plans with the h_+m -> h_-m marginals
    DynamicPlan plan;
    bool finite = true;
};

PlansDualResult dual_cheeger_plans(const std::vector<double>& h, const DiscreteSpace& space,
                                   double p, int max_edges = -1);

struct ConformalDualResult {
    double value = 0.0;  // q * sup_g [ K_{d_g}(h_+m, h_-m) - (1/p) sum m g^p ]
    std::vector<double> g;
    int outer_iterations = 0;
};

ConformalDualResult dual_cheeger_conformal(const std::vector<double>& h, const DiscreteSpace& space,
                                           double p, int starts = 5, std::uint64_t seed = 0);

struct TripleReport {
    double primal = 0.0;     // potential-form dual energy
    double plans = 0.0;
    double conformal = 0.0;
    double primal_pre = 0.0; // lip-based value, reported for reference
    double max_pairwise_gap = 0.0;
    bool finite = true;
};

TripleReport triple_agreement(const std::vector<double>& h, const DiscreteSpace& space, double p);

struct HwPoint {
    int n_edges = 0;
    double pre_energy = 0.0;   // H side
    double weak_energy = 0.0;  // W side
    double gap = 0.0;
};

struct HwReport {
    std::vector<HwPoint> points;
    bool weak_below_pre = true;
    bool gap_monotone = true;
};

/// Path-graph discretization of the unit interval with trapezoid node masses;
/// f_fn samples a smooth profile. The W side runs over all subinterval paths.
HwReport hw_refinement(const std::vector<int>& n_list, double (*f_fn)(double), double p);

CalculusReport wug_calculus_suite(const DiscreteSpace& space, const std::vector<Arc>& family,
                                  double p, int samples, std::uint64_t seed);

} // namespace mms
