#include "mms/polyapprox.hpp"

#include <algorithm>
#include <cmath>

namespace mms {

Poly::Poly(std::vector<double> bernstein_coeffs, double c) : coeffs_(std::move(bernstein_coeffs)), c_(c) {
    if (coeffs_.empty() || !(c > 0.0)) throw Error(ErrorCode::BadInput, "bad polynomial data");
}

namespace {

// Stable evaluation of sum_k b_k C(N,k) u^k (1-u)^{N-k}: factor out the larger
// of u, 1-u and run a Horner-type recursion in the ratio with long doubles.
// Binomials up to C(4096, 2048) fit the extended exponent range.
double bernstein_eval(const std::vector<double>& b, double u) {
    const int n = (int)b.size() - 1;
    if (n == 0) return b[0];
    u = std::min(std::max(u, 0.0), 1.0);
    if (u <= 0.5) {
        const long double t = (long double)u / (1.0L - (long double)u);
        long double acc = 0.0L, binom = 1.0L, tpow = 1.0L;
        for (int k = 0; k <= n; ++k) {
            acc += (long double)b[(std::size_t)k] * binom * tpow;
            binom = binom * (long double)(n - k) / (long double)(k + 1);
            tpow *= t;
        }
        return (double)(acc * std::pow(1.0L - (long double)u, (long double)n));
    }
    const long double t = (1.0L - (long double)u) / (long double)u;
    long double acc = 0.0L, binom = 1.0L, tpow = 1.0L;
    for (int k = n; k >= 0; --k) {
        acc += (long double)b[(std::size_t)k] * binom * tpow;
        binom = binom * (long double)k / (long double)(n - k + 1);
        tpow *= t;
    }
    return (double)(acc * std::pow((long double)u, (long double)n));
}

} // namespace

double Poly::eval(double r) const {
    const double u = (r + c_) / (2.0 * c_);
    return bernstein_eval(coeffs_, u);
}

Poly Poly::derivative_poly() const {
    const int n = degree();
    if (n == 0) return Poly({0.0}, c_);
    std::vector<double> d((std::size_t)n, 0.0);
    for (int k = 0; k < n; ++k)
        d[(std::size_t)k] =
            (double)n * (coeffs_[(std::size_t)k + 1] - coeffs_[(std::size_t)k]) / (2.0 * c_);
    return Poly(std::move(d), c_);
}

double Poly::derivative(double r) const {
    return derivative_poly().eval(r);
}

Poly bernstein(const std::function<double(double)>& phi, double c, int n) {
    if (n < 1) throw Error(ErrorCode::BadInput, "bernstein needs n >= 1");
    if (2 * n > kDegreeCap) throw Error(ErrorCode::DegreeCapExceeded, "degree above the cap");
    std::vector<double> b((std::size_t)(2 * n + 1), 0.0);
    for (int k = -n; k <= n; ++k) b[(std::size_t)(k + n)] = phi(c * (double)k / (double)n);
    return Poly(std::move(b), c);
}

TruncPolyResult trunc_poly(double c, double alpha, double beta, double eps) {
    if (!(alpha < beta) || !(eps > 0.0) || !(c >= std::max(std::abs(alpha), std::abs(beta))))
        throw Error(ErrorCode::BadInput, "trunc_poly needs alpha < beta, eps > 0, c >= max(|alpha|,|beta|)");
    auto clamp = [&](double r) { return std::max(alpha, std::min(r, beta)); };
    const bool odd = std::abs(alpha + beta) <= 1e-15 * (std::abs(alpha) + std::abs(beta));

    const int grid_points = 10000;
    const double spacing = 2.0 * c / grid_points;

    for (int n = 4; 2 * n <= kDegreeCap; n *= 2) {
        Poly p = bernstein(clamp, c, n);
        if (odd) {
            // antisymmetrize the exact samples so P(0) = 0 up to rounding
            std::vector<double> b = p.bernstein_coeffs();
            const std::size_t num = b.size();
            for (std::size_t k = 0; k < num; ++k) {
                const double v = 0.5 * (b[k] - b[num - 1 - k]);
                b[k] = v;
                b[num - 1 - k] = -v;
            }
            p = Poly(std::move(b), c);
        }

        // Grid certification: value error plus the off-grid margin (both P and
        // the clamp have derivative in [0,1], so the error is 1-Lipschitz... in
        // fact 2-Lipschitz in the worst case; half-spacing times 2 covers it).
        double worst = 0.0;
        for (int i = 0; i <= grid_points; ++i) {
            const double r = -c + spacing * i;
            worst = std::max(worst, std::abs(p.eval(r) - clamp(r)));
        }
        const double certified = worst + spacing;
        if (certified > eps / 2.0) continue;

        // Bound and derivative audit on the same grid.
        const Poly dp = p.derivative_poly();
        bool ok = true;
        const double tol = 1e-9 * (1.0 + std::abs(alpha) + std::abs(beta));
        for (int i = 0; i <= grid_points && ok; ++i) {
            const double r = -c + spacing * i;
            const double v = p.eval(r);
            if (v < alpha - tol || v > beta + tol) ok = false;
            const double d = dp.eval(r);
            if (d < -tol || d > 1.0 + tol) ok = false;
        }
        // spot finite differences as an independent derivative probe
        for (double r = -c + 1e-3; r < c - 1e-3 && ok; r += c / 7.0) {
            const double fd = (p.eval(r + 1e-4) - p.eval(r - 1e-4)) / 2e-4;
            if (fd < -1e-6 || fd > 1.0 + 1e-6) ok = false;
        }
        if (!ok) continue;

        TruncPolyResult out;
        out.poly = std::move(p);
        out.certified_error = certified;
        out.degree = 2 * n;
        return out;
    }
    throw Error(ErrorCode::DegreeCapExceeded, "no certified truncation within the degree cap");
}

SmoothMaxResult smooth_max(double c, double eps) {
    if (!(c > 0.0) || !(eps > 0.0)) throw Error(ErrorCode::BadInput, "smooth_max needs c, eps > 0");
    const double big_c = 4.0 * c;
    auto plus = [](double r) { return std::max(r, 0.0); };

    const int zgrid = 100000;
    const double zspacing = 4.0 * c / zgrid; // certification runs on [-2c, 2c]

    SmoothMaxResult out;
    out.c = c;
    bool built = false;
    for (int n = 8; 2 * n <= kDegreeCap; n *= 2) {
        Poly p = bernstein(plus, big_c, n);
        const double p0 = p.eval(0.0);

        // Certify sup_{z in [-2c,2c]} |p(z) - p0 - z_+| <= 0.9 eps; the
        // centered error profile is roughly symmetric around the kink, which
        // buys the factor-of-two over certifying p alone.
        double worst = 0.0;
        for (int i = 0; i <= zgrid; ++i) {
            const double z = -2.0 * c + zspacing * i;
            worst = std::max(worst, std::abs(p.eval(z) - p0 - plus(z)));
        }
        const double certified = worst + 2.0 * zspacing;
        if (certified > 0.9 * eps) continue;

        out.plus_part = std::move(p);
        out.p0 = p0;
        out.certified_error = certified;
        built = true;
        break;
    }
    if (!built) throw Error(ErrorCode::DegreeCapExceeded, "no certified smooth max within the degree cap");

    // Four-bound audit on the 256 x 256 grid.
    const Poly dp = out.plus_part.derivative_poly();
    const int g2 = 256;
    double worst_range = 0.0, worst_eps = 0.0, worst_partial = 0.0;
    for (int i = 0; i < g2; ++i)
        for (int j = 0; j < g2; ++j) {
            const double r = -c + 2.0 * c * i / (g2 - 1);
            const double s = -c + 2.0 * c * j / (g2 - 1);
            const double val = out.eval(r, s);
            worst_range = std::max({worst_range, std::min(r, s) - val, val - std::max(r, s)});
            worst_eps = std::max(worst_eps, std::abs(val - std::max(r, s)));
            const double d = dp.eval(s - r);
            worst_partial = std::max({worst_partial, -d, d - 1.0});
        }
    if (worst_range > 1e-9 * (1.0 + c) || worst_eps > eps || worst_partial > 1e-9)
        throw Error(ErrorCode::CertificationFailed, "smooth max failed its grid audit");
    return out;
}

} // namespace mms
