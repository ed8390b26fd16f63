#include "mms/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace mms {

namespace {

constexpr double kMassTol = 1e-10;

void check_masses(const std::vector<double>& mu0, const std::vector<double>& mu1) {
    for (double v : mu0)
        if (v < 0.0) throw Error(ErrorCode::BadInput, "negative mass in mu0");
    for (double v : mu1)
        if (v < 0.0) throw Error(ErrorCode::BadInput, "negative mass in mu1");
    const double m0 = std::accumulate(mu0.begin(), mu0.end(), 0.0);
    const double m1 = std::accumulate(mu1.begin(), mu1.end(), 0.0);
    if (std::abs(m0 - m1) > kMassTol * (1.0 + std::max(m0, m1)))
        throw Error(ErrorCode::MassMismatch, "mu0 and mu1 carry different total mass");
}

struct SspState {
    // Bipartite successive shortest paths with node potentials.
    std::size_t n;
    const DistMatrix* cost;
    std::vector<double> supply, demand;
    std::vector<double> pot_src, pot_snk;
    std::vector<double> flow; // n x n

    bool finite_cell(std::size_t i, std::size_t j) const { return is_finite((*cost)(i, j)); }

    // One Dijkstra over the residual bipartite graph. Arcs: src i -> snk j when
    // cost finite; snk j -> src i when flow(i,j) > 0. Reduced costs stay >= 0.
    bool augment_once() {
        const double inf = kInf;
        std::vector<double> dist_src(n, inf), dist_snk(n, inf);
        std::vector<int> par_snk(n, -1), par_src(n, -1); // parents across the bipartition
        using Item = std::pair<double, int>;             // node id: i or n + j
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > kMassTol) {
                dist_src[i] = 0.0;
                heap.emplace(0.0, (int)i);
            }
        std::vector<char> done_src(n, 0), done_snk(n, 0);
        while (!heap.empty()) {
            auto [d, id] = heap.top();
            heap.pop();
            if (id < (int)n) {
                const std::size_t i = (std::size_t)id;
                if (done_src[i]) continue;
                done_src[i] = 1;
                for (std::size_t j = 0; j < n; ++j) {
                    if (!finite_cell(i, j)) continue;
                    const double rc = (*cost)(i, j) - pot_src[i] + pot_snk[j];
                    const double alt = d + std::max(rc, 0.0);
                    if (alt < dist_snk[j] - 1e-15) {
                        dist_snk[j] = alt;
                        par_snk[j] = (int)i;
                        heap.emplace(alt, (int)(n + j));
                    }
                }
            } else {
                const std::size_t j = (std::size_t)(id - (int)n);
                if (done_snk[j]) continue;
                done_snk[j] = 1;
                for (std::size_t i = 0; i < n; ++i) {
                    if (flow[i * n + j] <= 0.0) continue;
                    const double rc = -((*cost)(i, j) - pot_src[i] + pot_snk[j]);
                    const double alt = d + std::max(rc, 0.0);
                    if (alt < dist_src[i] - 1e-15) {
                        dist_src[i] = alt;
                        par_src[i] = (int)j;
                        heap.emplace(alt, (int)i);
                    }
                }
            }
        }

        // Closest sink with remaining demand.
        int best = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (demand[j] > kMassTol && dist_snk[j] < inf)
                if (best < 0 || dist_snk[j] < dist_snk[(std::size_t)best]) best = (int)j;
        if (best < 0) return false;
        const double cap = dist_snk[(std::size_t)best];

        // Capping the update at the augmentation distance keeps every reduced
        // cost nonnegative for the next round.
        for (std::size_t i = 0; i < n; ++i)
            if (dist_src[i] < inf) pot_src[i] -= std::min(dist_src[i], cap);
        for (std::size_t j = 0; j < n; ++j)
            if (dist_snk[j] < inf) pot_snk[j] -= std::min(dist_snk[j], cap);

        // Walk back the alternating path; par_src < 0 marks the root source.
        double push = demand[(std::size_t)best];
        for (int j = best;;) {
            const int i = par_snk[(std::size_t)j];
            const int jprev = par_src[(std::size_t)i];
            if (jprev < 0) {
                push = std::min(push, supply[(std::size_t)i]);
                break;
            }
            push = std::min(push, flow[(std::size_t)i * n + (std::size_t)jprev]);
            j = jprev;
        }
        for (int j = best;;) {
            const int i = par_snk[(std::size_t)j];
            flow[(std::size_t)i * n + (std::size_t)j] += push;
            const int jprev = par_src[(std::size_t)i];
            if (jprev < 0) {
                supply[(std::size_t)i] -= push;
                break;
            }
            flow[(std::size_t)i * n + (std::size_t)jprev] -= push;
            j = jprev;
        }
        demand[(std::size_t)best] -= push;
        return push > 0.0;
    }
};

} // namespace

bool transport_feasible(const std::vector<double>& mu0, const std::vector<double>& mu1,
                        const DistMatrix& delta) {
    // Max-flow on the finite-cost cells with unit-free capacities: repeated BFS
    // augmentation on the bipartite graph (tiny sizes, simplicity wins).
    const std::size_t n = delta.size();
    std::vector<double> supply = mu0, demand = mu1;
    std::vector<double> flow(n * n, 0.0);
    while (true) {
        std::size_t src = n;
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > kMassTol) {
                src = i;
                break;
            }
        if (src == n) return true;

        // BFS over alternating residual paths from src.
        std::vector<int> par_snk(n, -2), par_src(n, -2);
        par_src[src] = -1;
        std::vector<std::size_t> q_src{src}, q_snk;
        int found = -1;
        while (found < 0 && (!q_src.empty() || !q_snk.empty())) {
            std::vector<std::size_t> nq_src, nq_snk;
            for (std::size_t i : q_src)
                for (std::size_t j = 0; j < n && found < 0; ++j)
                    if (is_finite(delta(i, j)) && par_snk[j] == -2) {
                        par_snk[j] = (int)i;
                        if (demand[j] > kMassTol) found = (int)j;
                        else nq_snk.push_back(j);
                    }
            if (found >= 0) break;
            for (std::size_t j : q_snk)
                for (std::size_t i = 0; i < n; ++i)
                    if (flow[i * n + j] > 0.0 && par_src[i] == -2) {
                        par_src[i] = (int)j;
                        nq_src.push_back(i);
                    }
            q_src = std::move(nq_src);
            q_snk = std::move(nq_snk);
            if (q_src.empty() && q_snk.empty()) break;
        }
        if (found < 0) return false;

        double push = demand[(std::size_t)found];
        int j = found;
        while (true) {
            int i = par_snk[(std::size_t)j];
            if (par_src[(std::size_t)i] == -1) {
                push = std::min(push, supply[(std::size_t)i]);
                break;
            }
            push = std::min(push, flow[(std::size_t)i * n + (std::size_t)par_src[(std::size_t)i]]);
            j = par_src[(std::size_t)i];
        }
        j = found;
        while (true) {
            int i = par_snk[(std::size_t)j];
            flow[(std::size_t)i * n + (std::size_t)j] += push;
            if (par_src[(std::size_t)i] == -1) {
                supply[(std::size_t)i] -= push;
                break;
            }
            flow[(std::size_t)i * n + (std::size_t)par_src[(std::size_t)i]] -= push;
            j = par_src[(std::size_t)i];
        }
        demand[(std::size_t)found] -= push;
    }
}

KrPrimalResult kr_primal(const std::vector<double>& mu0, const std::vector<double>& mu1,
                         const DistMatrix& delta) {
    check_masses(mu0, mu1);
    const std::size_t n = delta.size();
    KrPrimalResult out;
    if (!transport_feasible(mu0, mu1, delta)) {
        out.value = kInf;
        out.finite = false;
        return out;
    }

    SspState st{n, &delta, mu0, mu1, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<double>(n * n, 0.0)};
    while (true) {
        bool remaining = false;
        for (std::size_t i = 0; i < n; ++i)
            if (st.supply[i] > kMassTol) remaining = true;
        if (!remaining) break;
        if (!st.augment_once())
            throw Error(ErrorCode::Infeasible, "augmentation failed on a feasible instance");
    }

    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (st.flow[i * n + j] > 0.0) value += delta(i, j) * st.flow[i * n + j];
    out.value = value;
    out.coupling.n = n;
    out.coupling.matrix = std::move(st.flow);
    return out;
}

KrDualResult kr_dual(const std::vector<double>& mu0, const std::vector<double>& mu1,
                     const DistMatrix& delta) {
    check_masses(mu0, mu1);
    const std::size_t n = delta.size();
    KrDualResult out;
    if (!transport_feasible(mu0, mu1, delta)) {
        out.value = kInf;
        out.finite = false;
        return out;
    }

    SspState st{n, &delta, mu0, mu1, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<double>(n * n, 0.0)};
    while (true) {
        bool remaining = false;
        for (std::size_t i = 0; i < n; ++i)
            if (st.supply[i] > kMassTol) remaining = true;
        if (!remaining) break;
        if (!st.augment_once())
            throw Error(ErrorCode::Infeasible, "augmentation failed on a feasible instance");
    }

    // Two-sided prices pi = pot_src, rho = pot_snk satisfy pi(x) - rho(y) <=
    // delta(x,y) with equality on the support. The inf-convolution of rho is a
    // single Lipschitz potential squeezed between them, so it attains the same
    // value.
    std::vector<double> rho(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) rho[j] = st.pot_snk[j];
    std::vector<double> phi(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        double best = kInf;
        for (std::size_t y = 0; y < n; ++y) {
            if (!is_finite(delta(x, y))) continue;
            best = std::min(best, delta(x, y) + rho[y]);
        }
        phi[x] = best;
    }
    double value = 0.0;
    for (std::size_t x = 0; x < n; ++x) value += phi[x] * (mu0[x] - mu1[x]);
    out.value = value;
    out.potential = std::move(phi);
    return out;
}

KrMonotoneReport kr_monotone_limit(const std::vector<double>& mu0, const std::vector<double>& mu1,
                                   const SemidistanceFamily& family, const DiscreteSpace& space) {
    KrMonotoneReport rep;
    double prev = -kInf;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double v = kr_primal(mu0, mu1, family.member(i)).value;
        if (v < prev - 1e-12 * (1.0 + std::abs(prev))) rep.nondecreasing = false;
        rep.values.push_back(v);
        prev = v;
    }
    const double full = kr_primal(mu0, mu1, space.dist()).value;
    const double last = rep.values.back();
    if (is_finite(full) && is_finite(last))
        rep.final_vs_dist = std::abs(full - last);
    else
        rep.final_vs_dist = (std::isinf(full) && std::isinf(last)) ? 0.0 : kInf;
    return rep;
}

} // namespace mms
