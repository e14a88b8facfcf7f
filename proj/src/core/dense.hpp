#pragma once

#include <cstddef>
#include <vector>

namespace vmn {

// Row-major dense matrix, sized for desk-scale direct algebra.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    DenseMatrix transposed() const;
    std::vector<double> matvec(const std::vector<double>& x) const;
    DenseMatrix matmul(const DenseMatrix& b) const;

    void scale(double s);
    void add_scaled(const DenseMatrix& b, double s); // this += s*b

    double max_abs() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Result of a rank-revealing min-norm least-squares solve.
struct LstsqResult {
    std::vector<double> x;
    std::size_t rank = 0;
    double residual_norm = 0.0;
};

// Minimum-norm solution of min ||A x - b||_2 via complete orthogonal
// decomposition (column-pivoted Householder QR followed by a second QR of
// the leading block). The solution map b -> x is linear, which the
// structural invariants rely on. rank_tol is relative to the largest
// column norm; pass 0 for the default.
LstsqResult lstsq_min_norm(const DenseMatrix& a, const std::vector<double>& b, double rank_tol = 0.0);

// Numeric rank via the same pivoted QR.
std::size_t numeric_rank(const DenseMatrix& a, double rank_tol = 0.0);

} // namespace vmn
