#pragma once

#include <string>
#include <vector>

#include "mms/space.hpp"

namespace mms {

struct HopfLaxState {
    double t = 0.0;
    std::vector<double> values;            // Q_t f per node
    std::vector<std::vector<int>> minimizers;
    std::vector<double> d_plus, d_minus;   // spread of minimizer distances
};

/// Q_t f(x) = min_{y in K} f(y) + delta(x,y)^q / (q t^{q-1}); q is the
/// conjugate exponent of the global p.
HopfLaxState hopf_lax(const std::vector<double>& f, double t, const DiscreteSpace& space,
                      const std::vector<int>& K, const DistMatrix& delta, double p);

struct EstimateCheck {
    std::string name;
    double worst_residual = 0.0;
    bool pass = true;
};

struct EstimateSuiteReport {
    std::vector<EstimateCheck> checks;
    int d_gap_times = 0;        // grid times where d_minus < d_plus somewhere
    int d_gap_allowance = 0;    // n * |K|
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Runs the bound, monotonicity, slope-cap, integral-identity and upper-slope
/// checks over the time grid with K = X.
EstimateSuiteReport estimate_suite(const std::vector<double>& f, const DiscreteSpace& space,
                                   const DistMatrix& delta, const std::vector<double>& time_grid,
                                   double p);

struct MonotoneReport {
    bool pass = true;
    double worst_residual = 0.0;
};

/// Values are nonincreasing along a nested ascending chain of K sets whose
/// union is the node set; the last chain member must reproduce K = X exactly.
MonotoneReport monotone_in_K(const std::vector<double>& f, const DiscreteSpace& space,
                             const DistMatrix& delta, const std::vector<std::vector<int>>& k_chain,
                             double t, double p);

/// Values are nondecreasing along the semidistance family, the final member
/// agrees with dist, and its minimizer spread is dominated.
MonotoneReport monotone_in_delta(const std::vector<double>& f, const DiscreteSpace& space,
                                 const SemidistanceFamily& family, double t, double p);

/// f(x) - Q_t f(x) recomputed from the spread integral; used by the suite and
/// exposed for the trace tooling.
double spread_integral(const std::vector<double>& f, const DiscreteSpace& space,
                       const DistMatrix& delta, double p, int node, double t, double tol,
                       int max_evals = 32768);

} // namespace mms
