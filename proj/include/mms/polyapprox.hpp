#pragma once

#include <functional>
#include <vector>

#include "mms/errors.hpp"

namespace mms {

/// Polynomial on [-c, c] kept in the Bernstein basis (monomial coefficients of
/// Bernstein operators overflow double far below the degree cap, so the stable
/// form is stored and evaluated directly).
class Poly {
public:
    Poly() = default;
    Poly(std::vector<double> bernstein_coeffs, double c);

    double c() const { return c_; }
    int degree() const { return (int)coeffs_.size() - 1; }
    const std::vector<double>& bernstein_coeffs() const { return coeffs_; }

    double eval(double r) const;
    double derivative(double r) const;

    /// Exact Bernstein-form derivative polynomial (degree drops by one).
    Poly derivative_poly() const;

private:
    std::vector<double> coeffs_; // b_0..b_N over u = (r+c)/(2c)
    double c_ = 1.0;
};

constexpr int kDegreeCap = 4096; // total degree 2n

/// Degree-2n Bernstein operator on [-c, c] sampling phi at c*k/n, k = -n..n.
/// Reproduces affine functions and preserves value/derivative bounds of the
/// samples.
Poly bernstein(const std::function<double(double)>& phi, double c, int n);

struct TruncPolyResult {
    Poly poly;
    double certified_error = 0.0; // audited sup |P - clamp| including off-grid margin
    int degree = 0;
};

/// Certified approximant of the clamp alpha v r ^ beta: |P - clamp| <= eps,
/// alpha <= P <= beta, 0 <= P' <= 1 on [-c, c]; odd when alpha = -beta.
/// Refuses to return without passing its grid audit.
TruncPolyResult trunc_poly(double c, double alpha, double beta, double eps);

struct SmoothMaxResult {
    Poly plus_part;        // the r_+ approximant on [-4c, 4c]
    double p0 = 0.0;       // plus_part(0), subtracted so the diagonal is exact
    double c = 1.0;
    double certified_error = 0.0;

    double eval(double r, double s) const { return r + plus_part.eval(s - r) - p0; }
    double partial_r(double r, double s) const { return 1.0 - plus_part.derivative(s - r); }
    double partial_s(double r, double s) const { return plus_part.derivative(s - r); }
};

/// Two-variable smooth max Q(r,s) = r + P(s-r) - P(0) with
/// min <= Q <= max, |Q - max| <= eps, partials in [0,1] and joint 1-Lipschitz
/// bound, all audited on grids before returning.
SmoothMaxResult smooth_max(double c, double eps);

} // namespace mms
