#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

struct Coupling {
    std::vector<double> matrix; // n x n row-major, rows = mu0, cols = mu1
    std::size_t n = 0;
    double operator()(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
};

struct KrPrimalResult {
    double value = 0.0;          // kInf when infeasible over the finite-cost cells
    Coupling coupling;           // empty when infinite
    bool finite = true;
};

struct KrDualResult {
    double value = 0.0;
    std::vector<double> potential; // 1-Lipschitz w.r.t. delta on finite pairs
    bool finite = true;
};

/// Minimal coupling cost between equal-mass measures under the ground cost
/// delta; solved by successive shortest paths with potentials.
KrPrimalResult kr_primal(const std::vector<double>& mu0, const std::vector<double>& mu1,
                         const DistMatrix& delta);

/// Maximizes the potential form over 1-Lipschitz functions; the potential is
/// recovered from the optimal node prices and re-verified against the
/// constraints before the value is recomputed from scratch.
KrDualResult kr_dual(const std::vector<double>& mu0, const std::vector<double>& mu1,
                     const DistMatrix& delta);

struct KrMonotoneReport {
    std::vector<double> values;    // K_{d_i} per member
    double final_vs_dist = 0.0;    // |K_{d_last} - K_dist| restricted to finite masses
    bool nondecreasing = true;
};

KrMonotoneReport kr_monotone_limit(const std::vector<double>& mu0, const std::vector<double>& mu1,
                                   const SemidistanceFamily& family, const DiscreteSpace& space);

/// True when some coupling of mu0 to mu1 avoids every infinite-cost cell.
bool transport_feasible(const std::vector<double>& mu0, const std::vector<double>& mu1,
                        const DistMatrix& delta);

} // namespace mms
