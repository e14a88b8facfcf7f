#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vmn {

// Compressed sparse row matrix. Column indices are sorted within each row
// and duplicates are summed during construction.
class CsrMatrix {
  public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<std::uint32_t> ti, std::vector<std::uint32_t> tj,
                                   std::vector<double> tv);
    static CsrMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::uint64_t>& row_offsets() const { return row_offsets_; }
    const std::vector<std::uint32_t>& column_indices() const { return column_indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> matvec(const std::vector<double>& x) const;
    // y += alpha * A^T x
    void matvec_transpose_add(const std::vector<double>& x, std::vector<double>& y, double alpha = 1.0) const;

    CsrMatrix transposed() const;
    std::vector<double> diagonal() const;
    double max_abs_asymmetry() const; // ||A - A^T||_max
    double entry(std::uint32_t i, std::uint32_t j) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint64_t> row_offsets_;
    std::vector<std::uint32_t> column_indices_;
    std::vector<double> values_;
};

// alpha*A + beta*B with general pattern merge.
CsrMatrix csr_linear_combination(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

void write_matrix_market(const CsrMatrix& a, const std::string& path);

// Scalar P1 dofs N (one per mesh vertex), velocity dofs 2N in component-blocked
// order (all x-components first, then all y-components), pressure dofs N.
struct DofMap {
    std::size_t scalar_count = 0;

    std::size_t velocity_count() const { return 2 * scalar_count; }
    std::size_t pressure_count() const { return scalar_count; }
    std::size_t velocity_dof(int component, std::size_t node) const {
        return std::size_t(component) * scalar_count + node;
    }
};

// Prescribed values at constrained dofs, as functions of time.
struct DirichletSet {
    struct Entry {
        std::uint32_t dof = 0;
        std::function<double(double)> value; // t -> prescribed value
    };
    std::vector<Entry> entries;

    std::vector<double> evaluate(double t) const;
    void validate(std::size_t dof_count) const; // unique, in-range
    bool empty() const { return entries.empty(); }
};

// One-shot symmetric Dirichlet elimination: constrained rows/columns are
// replaced by identity with right-hand-side compensation, preserving symmetry.
void apply_dirichlet(CsrMatrix& a, std::vector<double>& rhs, const DirichletSet& bc, double t);

// Same elimination, factored once so a time loop only updates the rhs.
class ConstrainedSystem {
  public:
    ConstrainedSystem() = default;
    ConstrainedSystem(const CsrMatrix& a, const DirichletSet& bc);

    const CsrMatrix& matrix() const { return matrix_; }
    // rhs compensation + prescribed entries for boundary values at time t
    void apply_rhs(std::vector<double>& rhs, double t) const;
    void apply_rhs(std::vector<double>& rhs, const std::vector<double>& values) const;
    const std::vector<std::uint32_t>& constrained_dofs() const { return dofs_; }
    const DirichletSet& boundary() const { return bc_; }

  private:
    CsrMatrix matrix_;
    DirichletSet bc_;
    std::vector<std::uint32_t> dofs_;
    struct ColEntry {
        std::uint32_t row;
        std::uint32_t which; // index into dofs_
        double value;
    };
    std::vector<ColEntry> eliminated_;
};

struct CgOptions {
    double tol = 1e-10; // relative residual
    std::size_t max_iter = 10000;
};

// Jacobi-preconditioned conjugate gradient. Throws SolverFailure with the
// final residual when max_iter is exhausted.
std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& rhs, const CgOptions& opts,
                              const std::vector<double>* initial_guess = nullptr);

} // namespace vmn
