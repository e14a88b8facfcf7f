#include "core/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace vmn {

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> DenseMatrix::matvec(const std::vector<double>& x) const {
    require(x.size() == cols_, ErrorCode::InvalidArgument, "matvec dimension mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = a_.data() + i * cols_;
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix DenseMatrix::matmul(const DenseMatrix& b) const {
    require(cols_ == b.rows_, ErrorCode::InvalidArgument, "matmul dimension mismatch");
    DenseMatrix c(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.a_.data() + k * b.cols_;
            double* crow = c.a_.data() + i * b.cols_;
            for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

void DenseMatrix::scale(double s) {
    for (double& v : a_) v *= s;
}

void DenseMatrix::add_scaled(const DenseMatrix& b, double s) {
    require(rows_ == b.rows_ && cols_ == b.cols_, ErrorCode::InvalidArgument, "add dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * b.a_[i];
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

struct PivotedQr {
    DenseMatrix r;                 // Householder vectors below diag, R on/above
    std::vector<double> beta;      // Householder scalars
    std::vector<std::size_t> perm; // column permutation
    std::size_t rank = 0;
};

// Column-pivoted Householder QR of a copy of A.
PivotedQr qr_pivoted(const DenseMatrix& a, double rank_tol) {
    std::size_t m = a.rows(), n = a.cols();
    PivotedQr f;
    f.r = a;
    f.beta.assign(std::min(m, n), 0.0);
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), 0);

    std::vector<double> colnorm(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += f.r(i, j) * f.r(i, j);
        colnorm[j] = s;
    }
    double max0 = 0.0;
    for (double c : colnorm) max0 = std::max(max0, c);
    double tol = (rank_tol > 0 ? rank_tol : 1e-11) * std::sqrt(std::max(max0, 1e-300));

    std::size_t kmax = std::min(m, n);
    for (std::size_t k = 0; k < kmax; ++k) {
        // recompute remaining column norms (small sizes, keep it exact)
        std::size_t piv = k;
        double best = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += f.r(i, j) * f.r(i, j);
            if (s > best) {
                best = s;
                piv = j;
            }
        }
        if (std::sqrt(std::max(best, 0.0)) <= tol) break;
        if (piv != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(f.r(i, k), f.r(i, piv));
            std::swap(f.perm[k], f.perm[piv]);
        }
        // Householder for column k
        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha += f.r(i, k) * f.r(i, k);
        alpha = std::sqrt(alpha);
        if (f.r(k, k) > 0) alpha = -alpha;
        double v0 = f.r(k, k) - alpha;
        double vnorm2 = v0 * v0;
        for (std::size_t i = k + 1; i < m; ++i) vnorm2 += f.r(i, k) * f.r(i, k);
        if (vnorm2 == 0.0) {
            f.rank = k + 1;
            continue;
        }
        f.beta[k] = 2.0 / vnorm2;
        f.r(k, k) = v0; // store v in-place temporarily
        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += f.r(i, k) * f.r(i, j);
            dot *= f.beta[k];
            for (std::size_t i = k; i < m; ++i) f.r(i, j) -= dot * f.r(i, k);
        }
        // normalize stored v so that v[k] = 1, fold scaling into beta
        double scale = f.r(k, k);
        for (std::size_t i = k + 1; i < m; ++i) f.r(i, k) /= scale;
        f.beta[k] *= scale * scale;
        f.r(k, k) = alpha; // diagonal of R
        f.rank = k + 1;
    }
    // rank: count diagonal entries above tolerance
    std::size_t r = 0;
    for (std::size_t k = 0; k < f.rank; ++k)
        if (std::abs(f.r(k, k)) > tol) r = k + 1;
    f.rank = r;
    return f;
}

// y <- Q^T y using the implicit Householder vectors (v[k]=1 convention).
void apply_qt(const PivotedQr& f, std::vector<double>& y) {
    std::size_t m = f.r.rows();
    for (std::size_t k = 0; k < f.beta.size(); ++k) {
        if (f.beta[k] == 0.0) continue;
        double dot = y[k];
        for (std::size_t i = k + 1; i < m; ++i) dot += f.r(i, k) * y[i];
        dot *= f.beta[k];
        y[k] -= dot;
        for (std::size_t i = k + 1; i < m; ++i) y[i] -= dot * f.r(i, k);
    }
}

} // namespace

std::size_t numeric_rank(const DenseMatrix& a, double rank_tol) {
    return qr_pivoted(a, rank_tol).rank;
}

LstsqResult lstsq_min_norm(const DenseMatrix& a, const std::vector<double>& b, double rank_tol) {
    std::size_t m = a.rows(), n = a.cols();
    require(b.size() == m, ErrorCode::InvalidArgument, "lstsq dimension mismatch");

    PivotedQr f = qr_pivoted(a, rank_tol);
    std::size_t r = f.rank;

    LstsqResult res;
    res.rank = r;
    res.x.assign(n, 0.0);
    if (r == 0) {
        double s = 0.0;
        for (double v : b) s += v * v;
        res.residual_norm = std::sqrt(s);
        return res;
    }

    std::vector<double> c = b;
    apply_qt(f, c); // c = Q^T b

    // B = [R11 R12] (r x n); min-norm solution of B y = c[0..r) via QR of B^T.
    DenseMatrix bt(n, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < n; ++j) bt(j, i) = f.r(i, j);
    PivotedQr g = qr_pivoted(bt, rank_tol); // B^T = Z U with permutation (full rank r, pivots benign)

    // Solve U^T w' = P_g^T c1, then y = Z w.
    std::vector<double> c1(r);
    for (std::size_t i = 0; i < r; ++i) c1[i] = c[i];
    // account for column permutation of B^T (permutes the rows of U's coordinate system)
    std::vector<double> cp(r);
    for (std::size_t i = 0; i < r; ++i) cp[i] = c1[g.perm[i]];
    std::vector<double> w(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        double s = cp[i];
        for (std::size_t k = 0; k < i; ++k) s -= g.r(k, i) * w[k];
        double d = g.r(i, i);
        require(std::abs(d) > 0, ErrorCode::SingularSystem, "lstsq inner factor singular");
        w[i] = s / d;
    }
    // y = Z w: embed w into length-n vector and apply Householders in reverse
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < r; ++i) y[i] = w[i];
    for (std::size_t k = r; k-- > 0;) {
        if (g.beta[k] == 0.0) continue;
        double dot = y[k];
        for (std::size_t i = k + 1; i < n; ++i) dot += g.r(i, k) * y[i];
        dot *= g.beta[k];
        y[k] -= dot;
        for (std::size_t i = k + 1; i < n; ++i) y[i] -= dot * g.r(i, k);
    }
    // undo the outer column permutation
    for (std::size_t j = 0; j < n; ++j) res.x[f.perm[j]] = y[j];

    std::vector<double> ax = a.matvec(res.x);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (ax[i] - b[i]) * (ax[i] - b[i]);
    res.residual_norm = std::sqrt(s);
    return res;
}

} // namespace vmn
