#include "mms/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mms {

std::vector<double> mat_vec(const Mat& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> mat_t_vec(const Mat& a, const std::vector<double>& x) {
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

LdltSolver::LdltSolver(Mat a) : a_(std::move(a)) {
    const std::size_t n = a_.rows();
    if (a_.cols() != n) throw std::invalid_argument("LdltSolver needs a square matrix");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a_(i, i)));
    if (scale == 0.0) scale = 1.0;

    // Bunch-Kaufman is overkill here; plain LDL^T with a diagonal shift retry
    // covers the CPD KKT blocks these solvers produce.
    for (int attempt = 0; attempt < 40; ++attempt) {
        Mat f = a_;
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
            double d = f(k, k);
            if (!(std::abs(d) > scale * 1e-300)) {
                ok = false;
                break;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double l = f(i, k) / d;
                if (!std::isfinite(l)) {
                    ok = false;
                    break;
                }
                for (std::size_t j = k; j < n; ++j) f(i, j) -= l * f(k, j);
                f(i, k) = l;
            }
        }
        if (ok) {
            a_ = std::move(f);
            return;
        }
        shifted_ = true;
        const double shift = scale * std::pow(10.0, attempt - 14);
        for (std::size_t i = 0; i < n; ++i) a_(i, i) += shift;
    }
    throw std::runtime_error("LDL^T factorization failed");
}

std::vector<double> LdltSolver::solve(std::vector<double> rhs) const {
    const std::size_t n = a_.rows();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) rhs[i] -= a_(i, k) * rhs[k];
    for (std::size_t k = 0; k < n; ++k) rhs[k] /= a_(k, k);
    for (std::size_t k = n; k-- > 0;)
        for (std::size_t i = k + 1; i < n; ++i) rhs[k] -= a_(i, k) * rhs[i];
    return rhs;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

} // namespace mms
