#pragma once

#include <string>
#include <vector>

#include "core/dense.hpp"
#include "core/geometry.hpp"
#include "core/sparse.hpp"

namespace vmn {

// Tensor-product P1 space x P1 time basis on a tiny mesh. Desk-scale dense
// realization of the space-time block system; never used for dataset
// generation.
struct SpaceTimeBasis {
    Mesh mesh;
    DofMap dofmap;
    std::vector<double> time_nodes;              // increasing, first node at 0
    std::vector<std::uint8_t> node_is_boundary;  // spatial nodes carrying velocity data

    std::size_t spatial_count() const { return mesh.vertex_count(); }
    std::size_t time_count() const { return time_nodes.size(); }
    std::size_t velocity_total() const { return 2 * spatial_count() * time_count(); }
    std::size_t pressure_total() const { return spatial_count() * time_count(); }
    std::size_t total_dofs() const { return velocity_total() + pressure_total(); }

    // component-blocked, then time-major, then spatial node
    std::size_t velocity_dof(int component, std::size_t node, std::size_t time) const {
        std::size_t nt = spatial_count() * time_count();
        return std::size_t(component) * nt + time * spatial_count() + node;
    }
    std::size_t pressure_dof(std::size_t node, std::size_t time) const {
        return time * spatial_count() + node;
    }
};

// constrain_boundary=false classifies every spatial node as interior, which
// makes tiny one-element instances solvable.
SpaceTimeBasis make_spacetime_basis(Mesh mesh, std::size_t time_node_count, double tau,
                                    bool constrain_boundary = true);

// 1D P1 temporal matrices, exposed for oracle checks.
DenseMatrix temporal_mass(const std::vector<double>& nodes);        // (theta_a, theta_b)
DenseMatrix temporal_derivative(const std::vector<double>& nodes);  // (theta_a', theta_b)

struct BlockSystem {
    const SpaceTimeBasis* basis = nullptr;
    double rho = 1.0, mu = 1.0;

    DenseMatrix l, w, k, m; // full space-time matrices; a = w + k
    DenseMatrix a;

    // dof classes: velocity splits (initial / boundary / free),
    // pressure splits (initial / free)
    std::vector<std::size_t> u0_dofs, g_dofs, ut_dofs;
    std::vector<std::size_t> p0_dofs, pt_dofs;

    // reduced saddle matrix [[A~, -L~^T], [L~, 0]]
    DenseMatrix saddle;
};

BlockSystem assemble_blocks(const SpaceTimeBasis& basis, double rho, double mu);

// The four additive contributions of the discrete solution. Each vector has
// velocity_total + pressure_total entries; boundary/initial slots of a
// contribution carry the corresponding data so the sum reproduces the full
// solution field.
struct OperatorCoefficients {
    std::vector<double> b_f, b_g, b_u0, b_p0;
    std::vector<double> total() const;
};

struct SaddleSolution {
    OperatorCoefficients coeffs;
    std::size_t rank = 0;
    std::size_t saddle_dim = 0;
    double residual_norm = 0.0;
};

// Dense min-norm least-squares solve of the reduced saddle system, split into
// the four right-hand-side contributions. With require_full_rank the solve
// throws SingularSystem (reporting the numeric rank) when rank < dimension.
SaddleSolution solve_saddle(const BlockSystem& system, const std::vector<double>& f,
                            const std::vector<double>& g, const std::vector<double>& u0,
                            const std::vector<double>& p0, bool require_full_rank = false);

// Blocks of the pseudoinverse of the saddle matrix, columns solved one at a
// time; intended for tiny instances only.
struct InverseBlocks {
    DenseMatrix d1, d2, d3, d4;
};
InverseBlocks compute_inverse_blocks(const BlockSystem& system);

// Contract a coefficient vector against the basis at (x, t).
std::array<double, 3> evaluate_spacetime(const SpaceTimeBasis& basis, const std::vector<double>& coeffs,
                                         Point2 x, double t);

// Full operator: assemble inputs, solve, evaluate. Throws OutOfDomain for
// points outside the space-time cylinder.
std::array<double, 3> discrete_operator(const SpaceTimeBasis& basis, double rho, double mu,
                                        const std::vector<double>& f, const std::vector<double>& g,
                                        const std::vector<double>& u0, const std::vector<double>& p0,
                                        Point2 x, double t);

// Invariant report used by the spacetime-check CLI subcommand.
struct SpacetimeCheckReport {
    std::string text;
    int failures = 0;
};
SpacetimeCheckReport run_spacetime_checks(int mesh_n, std::size_t time_nodes, double tau);

} // namespace vmn
