#pragma once

#include "core/geometry.hpp"
#include "core/sparse.hpp"

namespace vmn {

// P1 element matrices are integrated in closed form (exact for the degree-2
// integrands involved), so no quadrature loop appears anywhere.

// scalar mass M_ij = (phi_i, phi_j), N x N, SPD
CsrMatrix assemble_mass(const Mesh& mesh);

// scalar stiffness K_ij = (grad phi_i, grad phi_j), N x N, unit viscosity;
// callers scale by mu (momentum form) or 2*mu (symmetric-gradient form).
CsrMatrix assemble_stiffness(const Mesh& mesh);

// divergence L_qj = (phi_q, d_c phi_j) with velocity columns component-blocked,
// N x 2N
CsrMatrix assemble_divergence(const Mesh& mesh, const DofMap& dofmap);

// gradient pairing G_(c,i),q = (phi_i, d_c phi_q), 2N x N; used for the
// pressure-gradient term so no boundary integral arises.
CsrMatrix assemble_gradient(const Mesh& mesh, const DofMap& dofmap);

// expands a scalar N x N matrix to the component-blocked 2N x 2N form
CsrMatrix velocity_block_diag(const CsrMatrix& scalar);

DofMap make_dofmap(const Mesh& mesh);

// one third of the total area of the triangles touching each vertex
std::vector<double> lumped_vertex_areas(const Mesh& mesh);

} // namespace vmn
