#include "core/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"

namespace vmn {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<std::uint32_t> ti,
                                   std::vector<std::uint32_t> tj, std::vector<double> tv) {
    require(ti.size() == tj.size() && tj.size() == tv.size(), ErrorCode::InvalidArgument,
            "triplet arrays must have equal length");
    CsrMatrix m(rows, cols);
    std::vector<std::size_t> order(ti.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ti[a] != ti[b] ? ti[a] < ti[b] : tj[a] < tj[b];
    });
    std::uint32_t prev_i = UINT32_MAX, prev_j = UINT32_MAX;
    for (std::size_t k : order) {
        require(ti[k] < rows && tj[k] < cols, ErrorCode::InvalidArgument, "triplet index out of range");
        if (!m.values_.empty() && ti[k] == prev_i && tj[k] == prev_j) {
            m.values_.back() += tv[k];
        } else {
            m.column_indices_.push_back(tj[k]);
            m.values_.push_back(tv[k]);
            prev_i = ti[k];
            prev_j = tj[k];
        }
        m.row_offsets_[ti[k] + 1] = m.column_indices_.size();
    }
    // fill gaps: rows without entries inherit previous offset
    for (std::size_t r = 1; r <= rows; ++r)
        m.row_offsets_[r] = std::max(m.row_offsets_[r], m.row_offsets_[r - 1]);
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix m(n, n);
    m.column_indices_.resize(n);
    m.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.column_indices_[i] = std::uint32_t(i);
        m.row_offsets_[i + 1] = i + 1;
    }
    return m;
}

void CsrMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    require(x.size() == cols_, ErrorCode::InvalidArgument, "matvec dimension mismatch");
    y.assign(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::uint64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            s += values_[k] * x[column_indices_[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::matvec(const std::vector<double>& x) const {
    std::vector<double> y;
    matvec(x, y);
    return y;
}

void CsrMatrix::matvec_transpose_add(const std::vector<double>& x, std::vector<double>& y, double alpha) const {
    require(x.size() == rows_ && y.size() == cols_, ErrorCode::InvalidArgument,
            "transpose matvec dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
        double xi = alpha * x[i];
        if (xi == 0.0) continue;
        for (std::uint64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            y[column_indices_[k]] += values_[k] * xi;
    }
}

CsrMatrix CsrMatrix::transposed() const {
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    ti.reserve(nnz());
    tj.reserve(nnz());
    tv.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::uint64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            ti.push_back(column_indices_[k]);
            tj.push_back(std::uint32_t(i));
            tv.push_back(values_[k]);
        }
    return from_triplets(cols_, rows_, std::move(ti), std::move(tj), std::move(tv));
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::uint64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            if (column_indices_[k] == i) d[i] = values_[k];
    return d;
}

double CsrMatrix::max_abs_asymmetry() const {
    CsrMatrix t = transposed();
    CsrMatrix d = csr_linear_combination(1.0, *this, -1.0, t);
    double m = 0.0;
    for (double v : d.values()) m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::entry(std::uint32_t i, std::uint32_t j) const {
    for (std::uint64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        if (column_indices_[k] == j) return values_[k];
    return 0.0;
}

CsrMatrix csr_linear_combination(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::InvalidArgument,
            "linear combination dimension mismatch");
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    ti.reserve(a.nnz() + b.nnz());
    tj.reserve(a.nnz() + b.nnz());
    tv.reserve(a.nnz() + b.nnz());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::uint64_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
            ti.push_back(std::uint32_t(i));
            tj.push_back(a.column_indices()[k]);
            tv.push_back(alpha * a.values()[k]);
        }
        for (std::uint64_t k = b.row_offsets()[i]; k < b.row_offsets()[i + 1]; ++k) {
            ti.push_back(std::uint32_t(i));
            tj.push_back(b.column_indices()[k]);
            tv.push_back(beta * b.values()[k]);
        }
    }
    return CsrMatrix::from_triplets(a.rows(), a.cols(), std::move(ti), std::move(tj), std::move(tv));
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::Io, "cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::uint64_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
            out << (i + 1) << " " << (a.column_indices()[k] + 1) << " " << a.values()[k] << "\n";
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

std::vector<double> DirichletSet::evaluate(double t) const {
    std::vector<double> v(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) v[i] = entries[i].value(t);
    return v;
}

void DirichletSet::validate(std::size_t dof_count) const {
    std::vector<std::uint32_t> idx;
    idx.reserve(entries.size());
    for (auto& e : entries) {
        require(e.dof < dof_count, ErrorCode::InvalidArgument, "dirichlet dof out of range");
        idx.push_back(e.dof);
    }
    std::sort(idx.begin(), idx.end());
    require(std::adjacent_find(idx.begin(), idx.end()) == idx.end(), ErrorCode::InvalidArgument,
            "duplicate dirichlet dof");
}

ConstrainedSystem::ConstrainedSystem(const CsrMatrix& a, const DirichletSet& bc) : bc_(bc) {
    require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "constrained system must be square");
    bc.validate(a.rows());
    std::vector<std::uint32_t> which(a.rows(), UINT32_MAX);
    for (std::uint32_t i = 0; i < bc.entries.size(); ++i) {
        dofs_.push_back(bc.entries[i].dof);
        which[bc.entries[i].dof] = i;
    }

    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        bool row_constrained = which[i] != UINT32_MAX;
        if (row_constrained) {
            ti.push_back(std::uint32_t(i));
            tj.push_back(std::uint32_t(i));
            tv.push_back(1.0);
            continue;
        }
        for (std::uint64_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
            std::uint32_t j = a.column_indices()[k];
            if (which[j] != UINT32_MAX) {
                if (a.values()[k] != 0.0)
                    eliminated_.push_back({std::uint32_t(i), which[j], a.values()[k]});
            } else {
                ti.push_back(std::uint32_t(i));
                tj.push_back(j);
                tv.push_back(a.values()[k]);
            }
        }
    }
    matrix_ = CsrMatrix::from_triplets(a.rows(), a.cols(), std::move(ti), std::move(tj), std::move(tv));
}

void ConstrainedSystem::apply_rhs(std::vector<double>& rhs, double t) const {
    apply_rhs(rhs, bc_.evaluate(t));
}

void ConstrainedSystem::apply_rhs(std::vector<double>& rhs, const std::vector<double>& values) const {
    require(values.size() == dofs_.size(), ErrorCode::InvalidArgument, "boundary value count mismatch");
    for (auto& e : eliminated_) rhs[e.row] -= e.value * values[e.which];
    for (std::size_t i = 0; i < dofs_.size(); ++i) rhs[dofs_[i]] = values[i];
}

void apply_dirichlet(CsrMatrix& a, std::vector<double>& rhs, const DirichletSet& bc, double t) {
    require(rhs.size() == a.rows(), ErrorCode::InvalidArgument, "rhs dimension mismatch");
    ConstrainedSystem sys(a, bc);
    sys.apply_rhs(rhs, t);
    a = sys.matrix();
}

std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& rhs, const CgOptions& opts,
                              const std::vector<double>* initial_guess) {
    std::size_t n = a.rows();
    require(a.cols() == n && rhs.size() == n, ErrorCode::InvalidArgument, "cg dimension mismatch");

    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);

    std::vector<double> x = initial_guess ? *initial_guess : std::vector<double>(n, 0.0);
    std::vector<double> r(n), z(n), p(n), ap(n);
    a.matvec(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    };

    precondition(r, z);
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    double rnorm = 0.0;
    for (double v : r) rnorm += v * v;
    rnorm = std::sqrt(rnorm);

    std::size_t it = 0;
    while (rnorm / bnorm > opts.tol) {
        if (it++ >= opts.max_iter) {
            std::ostringstream msg;
            msg << "cg failed to converge in " << opts.max_iter
                << " iterations, relative residual " << (rnorm / bnorm);
            fail(ErrorCode::SolverFailure, msg.str());
        }
        a.matvec(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) fail(ErrorCode::SolverFailure, "cg breakdown: matrix not positive definite");
        double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precondition(r, z);
        double rz_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = 0.0;
        for (double v : r) rnorm += v * v;
        rnorm = std::sqrt(rnorm);
    }
    return x;
}

} // namespace vmn
