#pragma once

#include <cstddef>
#include <vector>

namespace mms {

/// Dense row-major matrix, just enough for the small KKT systems the solvers build.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> mat_vec(const Mat& a, const std::vector<double>& x);
std::vector<double> mat_t_vec(const Mat& a, const std::vector<double>& x);

/// In-place LDL^T factorization with diagonal shift fallback; solves SPD or
/// mildly indefinite KKT-style systems at these sizes.
class LdltSolver {
public:
    explicit LdltSolver(Mat a);
    std::vector<double> solve(std::vector<double> rhs) const;
    bool shifted() const { return shifted_; }

private:
    Mat a_;
    bool shifted_ = false;
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm_inf(const std::vector<double>& a);

} // namespace mms
