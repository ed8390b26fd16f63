#pragma once

#include <vector>

#include "mms/arcs.hpp"
#include "mms/space.hpp"

namespace mms {

struct ModulusSolution {
    double value = 0.0;              // extended real; kInf when a constant arc forces it
    std::vector<double> density;     // empty unless value finite and > 0
    double achieved_gap = 0.0;       // certified relative primal/dual gap
    int iterations = 0;
    std::vector<std::size_t> active; // indices into the enumerated family with tight constraints
    bool converged = true;
};

struct ModulusOptions {
    double tol_gap = 1e-9;           // inner certified relative gap target
    double separation_tol = 1e-8;    // outer loop stops when no constraint violated past this
    int max_rounds = 64;
    std::uint64_t start_seed = 0;    // perturbs the initial point (solution is unique)
};

/// Mod_p over the enumerated arcs: min sum m f^p s.t. the arc integral of f is
/// at least 1 on every family member.
ModulusSolution modulus_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                          const ModulusOptions& opts = {});

/// Variant with the endpoint-augmented constraint f(a) + f(b) + arc integral >= 1.
ModulusSolution modulus_tilde_p(const std::vector<Arc>& family, const DiscreteSpace& space, double p,
                                const ModulusOptions& opts = {});

/// Generic nonnegative p-energy minimizer under per-arc lower bounds; rows and
/// bounds are caller supplied. Used by the modulus operations above and by the
/// weak-gradient solver.
ModulusSolution constrained_p_energy(const std::vector<std::vector<double>>& rows,
                                     const std::vector<double>& bounds,
                                     const std::vector<double>& measure, double p,
                                     const ModulusOptions& opts = {});

struct FugledeReport {
    std::vector<double> per_step_worst;  // max over arcs of the arc integral of |f_k - f|
    std::vector<double> declared_bound;  // tail bound sum ||f_j - f||_p * max len * max m^{-1/p}
    bool pass = true;
};

FugledeReport fuglede_check(const DiscreteSpace& space, double p,
                            const std::vector<std::vector<double>>& f_sequence,
                            const std::vector<double>& f_limit, const std::vector<Arc>& family);

/// Separation oracle for unrestricted connector families: the most violated
/// admissibility constraint under the density f is the minimum trapezoid-
/// integral path, a shortest path in edge weights dist * (f(u)+f(v))/2.
/// Ties resolve to the lexicographically smallest node sequence.
struct SeparationResult {
    double min_integral = kInf;
    std::vector<int> path;
};
SeparationResult min_integral_path(const DiscreteSpace& space, const std::vector<double>& f,
                                   const std::vector<int>& source, const std::vector<int>& target);

void require_exponent(double p);

} // namespace mms
