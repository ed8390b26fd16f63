#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mms/linalg.hpp"

namespace mms {

/// Separable smooth convex objective: sum of per-coordinate terms.
/// POWER terms w*x^p require x > 0 along the central path (callers add the
/// matching bound rows); LINEAR terms are unrestricted.
struct SeparableTerm {
    enum class Kind { Linear, Power };
    Kind kind = Kind::Linear;
    double weight = 0.0;   // linear coefficient, or the multiplier of x^p
    double exponent = 2.0; // only for Power
};

struct BarrierOptions {
    double tol_gap = 1e-10;      // target mu * (#inequalities)
    double mu0 = 1.0;
    double mu_shrink = 0.2;
    int max_newton_per_stage = 60;
    int max_total_newton = 4000;
    double newton_tol = 1e-12;
};

struct BarrierResult {
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> ineq_multipliers; // lambda_i = mu / slack_i at the last stage
    std::vector<double> eq_multipliers;
    double mu_final = 0.0;
    int newton_iterations = 0;
    bool converged = false;
};

/// Dense path-following barrier for
///     min sum_i term_i(x_i)  s.t.  A_ub x <= b_ub, A_eq x = b_eq
/// starting from an x0 strictly feasible for the inequalities.
BarrierResult barrier_minimize(const std::vector<SeparableTerm>& terms, const Mat& a_ub,
                               const std::vector<double>& b_ub, const Mat& a_eq,
                               const std::vector<double>& b_eq, std::vector<double> x0,
                               const BarrierOptions& opts = {});

struct PlanProblem {
    // min  (1/q) sum_x m_x^{1-q} y_x^q  -  reward^T w,   y = N^T w,
    // s.t. E w = c (optional), w >= 0.
    Mat nu;                        // P x n matrix of arc measures
    std::vector<double> measure;   // node measure m
    double q = 2.0;
    std::vector<double> reward;    // per-path linear reward (may be empty = zero)
    Mat eq;                        // k x P (may be 0 x P)
    std::vector<double> eq_rhs;
};

struct PlanResult {
    std::vector<double> weights;
    double objective = 0.0;        // value of the minimized objective
    std::vector<double> barycenter_density; // h = (N^T w) / m
    std::vector<double> eq_multipliers;
    double mu_final = 0.0;
    int newton_iterations = 0;
    bool converged = false;
};

/// Same barrier scheme with the Hessian kept in diagonal-plus-low-rank form,
/// so path counts in the thousands stay cheap.
PlanResult plan_minimize(const PlanProblem& problem, std::vector<double> w0,
                         const BarrierOptions& opts = {});

struct QuadratureResult {
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive Simpson with Richardson-style acceptance, capped at max_evals
/// function evaluations (default 2^15).
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_evals = 32768);

} // namespace mms
