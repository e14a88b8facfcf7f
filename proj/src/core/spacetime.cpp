#include "core/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/assembly.hpp"
#include "core/errors.hpp"

namespace vmn {

SpaceTimeBasis make_spacetime_basis(Mesh mesh, std::size_t time_node_count, double tau,
                                    bool constrain_boundary) {
    require(time_node_count >= 2, ErrorCode::InvalidArgument, "need at least two time nodes");
    require(tau > 0, ErrorCode::InvalidArgument, "tau must be positive");
    SpaceTimeBasis basis;
    basis.mesh = std::move(mesh);
    basis.dofmap = make_dofmap(basis.mesh);
    basis.time_nodes.resize(time_node_count);
    for (std::size_t a = 0; a < time_node_count; ++a)
        basis.time_nodes[a] = tau * double(a) / double(time_node_count - 1);
    basis.node_is_boundary.assign(basis.spatial_count(), 0);
    if (constrain_boundary)
        for (auto v : basis.mesh.boundary_vertices()) basis.node_is_boundary[v] = 1;
    return basis;
}

DenseMatrix temporal_mass(const std::vector<double>& nodes) {
    std::size_t n = nodes.size();
    DenseMatrix m(n, n);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        double h = nodes[e + 1] - nodes[e];
        m(e, e) += h / 3.0;
        m(e, e + 1) += h / 6.0;
        m(e + 1, e) += h / 6.0;
        m(e + 1, e + 1) += h / 3.0;
    }
    return m;
}

DenseMatrix temporal_derivative(const std::vector<double>& nodes) {
    std::size_t n = nodes.size();
    DenseMatrix c(n, n);
    // (theta_a', theta_b) per element, independent of the element length
    for (std::size_t e = 0; e + 1 < n; ++e) {
        c(e, e) += -0.5;
        c(e, e + 1) += -0.5;
        c(e + 1, e) += 0.5;
        c(e + 1, e + 1) += 0.5;
    }
    return c;
}

namespace {

DenseMatrix densify(const CsrMatrix& a) {
    DenseMatrix d(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::uint64_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
            d(i, a.column_indices()[k]) += a.values()[k];
    return d;
}

DenseMatrix submatrix(const DenseMatrix& a, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols) {
    DenseMatrix s(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
    return s;
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

} // namespace

BlockSystem assemble_blocks(const SpaceTimeBasis& basis, double rho, double mu) {
    require(basis.total_dofs() <= 2048, ErrorCode::TooLarge,
            "space-time instance exceeds the dense dof budget (" +
                std::to_string(basis.total_dofs()) + " > 2048)");
    require(rho > 0 && mu > 0, ErrorCode::InvalidArgument, "rho and mu must be positive");

    BlockSystem sys;
    sys.basis = &basis;
    sys.rho = rho;
    sys.mu = mu;

    DenseMatrix ms = densify(assemble_mass(basis.mesh));
    DenseMatrix ks = densify(assemble_stiffness(basis.mesh));
    DenseMatrix ls = densify(assemble_divergence(basis.mesh, basis.dofmap));
    DenseMatrix mt = temporal_mass(basis.time_nodes);
    DenseMatrix ct = temporal_derivative(basis.time_nodes);

    std::size_t ns = basis.spatial_count();
    std::size_t nt = basis.time_count();
    std::size_t nv = basis.velocity_total();
    std::size_t np = basis.pressure_total();

    sys.m = DenseMatrix(nv, nv);
    sys.k = DenseMatrix(nv, nv);
    sys.w = DenseMatrix(nv, nv);
    for (int c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < nt; ++a)
            for (std::size_t b = 0; b < nt; ++b) {
                if (mt(a, b) == 0.0 && ct(a, b) == 0.0) continue;
                for (std::size_t i = 0; i < ns; ++i)
                    for (std::size_t j = 0; j < ns; ++j) {
                        std::size_t r = basis.velocity_dof(c, i, a);
                        std::size_t s = basis.velocity_dof(c, j, b);
                        sys.m(r, s) = ms(i, j) * mt(a, b);
                        sys.k(r, s) = 2.0 * mu * ks(i, j) * mt(a, b);
                        sys.w(r, s) = rho * ms(i, j) * ct(a, b);
                    }
            }
    sys.a = sys.w;
    sys.a.add_scaled(sys.k, 1.0);

    sys.l = DenseMatrix(np, nv);
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = 0; b < nt; ++b) {
            if (mt(a, b) == 0.0) continue;
            for (std::size_t q = 0; q < ns; ++q)
                for (int c = 0; c < 2; ++c)
                    for (std::size_t j = 0; j < ns; ++j) {
                        std::size_t col_s = basis.dofmap.velocity_dof(c, j);
                        sys.l(basis.pressure_dof(q, a), basis.velocity_dof(c, j, b)) +=
                            ls(q, col_s) * mt(a, b);
                    }
        }

    // dof classes: initial time level, boundary data, free
    for (int c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < nt; ++a)
            for (std::size_t i = 0; i < ns; ++i) {
                std::size_t dof = basis.velocity_dof(c, i, a);
                if (a == 0)
                    sys.u0_dofs.push_back(dof);
                else if (basis.node_is_boundary[i])
                    sys.g_dofs.push_back(dof);
                else
                    sys.ut_dofs.push_back(dof);
            }
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t q = 0; q < ns; ++q) {
            std::size_t dof = basis.pressure_dof(q, a);
            (a == 0 ? sys.p0_dofs : sys.pt_dofs).push_back(dof);
        }
    require(!sys.ut_dofs.empty(), ErrorCode::InvalidConfiguration,
            "space-time basis has no free velocity dofs");

    // reduced saddle [[A~, -L~^T],[L~, 0]] over (ut, pt)
    DenseMatrix a_tilde = submatrix(sys.a, sys.ut_dofs, sys.ut_dofs);
    DenseMatrix l_tilde = submatrix(sys.l, sys.pt_dofs, sys.ut_dofs);
    std::size_t nu = sys.ut_dofs.size(), npt = sys.pt_dofs.size();
    sys.saddle = DenseMatrix(nu + npt, nu + npt);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nu; ++j) sys.saddle(i, j) = a_tilde(i, j);
    for (std::size_t i = 0; i < npt; ++i)
        for (std::size_t j = 0; j < nu; ++j) {
            sys.saddle(nu + i, j) = l_tilde(i, j);
            sys.saddle(j, nu + i) = -l_tilde(i, j);
        }
    return sys;
}

std::vector<double> OperatorCoefficients::total() const {
    std::vector<double> s(b_f.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = b_f[i] + b_g[i] + b_u0[i] + b_p0[i];
    return s;
}

namespace {

// RHS of the reduced system for one input contribution.
struct ReducedRhs {
    std::vector<double> momentum; // over ut rows
    std::vector<double> continuity; // over pt rows
};

std::vector<double> solve_reduced(const BlockSystem& sys, const ReducedRhs& rhs, std::size_t* rank,
                                  double* residual) {
    std::size_t nu = sys.ut_dofs.size(), npt = sys.pt_dofs.size();
    std::vector<double> b(nu + npt, 0.0);
    for (std::size_t i = 0; i < nu; ++i) b[i] = rhs.momentum[i];
    for (std::size_t i = 0; i < npt; ++i) b[nu + i] = rhs.continuity[i];
    LstsqResult r = lstsq_min_norm(sys.saddle, b);
    if (rank) *rank = r.rank;
    if (residual) *residual = std::max(*residual, r.residual_norm);
    return r.x;
}

// Scatter the reduced solution into a full (velocity + pressure) coefficient
// vector, optionally with prescribed data in its own slots.
std::vector<double> embed(const BlockSystem& sys, const std::vector<double>& reduced,
                          const std::vector<double>* u0, const std::vector<double>* g,
                          const std::vector<double>* p0) {
    const SpaceTimeBasis& basis = *sys.basis;
    std::size_t nv = basis.velocity_total();
    std::vector<double> full(nv + basis.pressure_total(), 0.0);
    std::size_t nu = sys.ut_dofs.size();
    for (std::size_t i = 0; i < nu; ++i) full[sys.ut_dofs[i]] = reduced[i];
    for (std::size_t i = 0; i < sys.pt_dofs.size(); ++i) full[nv + sys.pt_dofs[i]] = reduced[nu + i];
    if (u0)
        for (std::size_t i = 0; i < sys.u0_dofs.size(); ++i) full[sys.u0_dofs[i]] = (*u0)[i];
    if (g)
        for (std::size_t i = 0; i < sys.g_dofs.size(); ++i) full[sys.g_dofs[i]] = (*g)[i];
    if (p0)
        for (std::size_t i = 0; i < sys.p0_dofs.size(); ++i) full[nv + sys.p0_dofs[i]] = (*p0)[i];
    return full;
}

} // namespace

SaddleSolution solve_saddle(const BlockSystem& sys, const std::vector<double>& f,
                            const std::vector<double>& g, const std::vector<double>& u0,
                            const std::vector<double>& p0, bool require_full_rank) {
    const SpaceTimeBasis& basis = *sys.basis;
    require(f.size() == basis.velocity_total(), ErrorCode::InvalidArgument, "F must span all velocity dofs");
    require(g.size() == sys.g_dofs.size(), ErrorCode::InvalidArgument, "G size mismatch");
    require(u0.size() == sys.u0_dofs.size(), ErrorCode::InvalidArgument, "U0 size mismatch");
    require(p0.size() == sys.p0_dofs.size(), ErrorCode::InvalidArgument, "P0 size mismatch");

    std::size_t nu = sys.ut_dofs.size(), npt = sys.pt_dofs.size();

    // b_f:   [ (M F)|mom ; 0 ]
    ReducedRhs rf{std::vector<double>(nu, 0.0), std::vector<double>(npt, 0.0)};
    {
        std::vector<double> mf = sys.m.matvec(f);
        rf.momentum = gather(mf, sys.ut_dofs);
    }
    // b_g:   [ -(A_g G)|mom ; -(L_g G) ]
    ReducedRhs rg{std::vector<double>(nu, 0.0), std::vector<double>(npt, 0.0)};
    {
        DenseMatrix ag = submatrix(sys.a, sys.ut_dofs, sys.g_dofs);
        DenseMatrix lg = submatrix(sys.l, sys.pt_dofs, sys.g_dofs);
        auto m1 = ag.matvec(g);
        auto m2 = lg.matvec(g);
        for (std::size_t i = 0; i < nu; ++i) rg.momentum[i] = -m1[i];
        for (std::size_t i = 0; i < npt; ++i) rg.continuity[i] = -m2[i];
    }
    // b_u0:  [ -(A_0 U0)|mom ; -(L_0 U0) ]
    ReducedRhs ru{std::vector<double>(nu, 0.0), std::vector<double>(npt, 0.0)};
    {
        DenseMatrix a0 = submatrix(sys.a, sys.ut_dofs, sys.u0_dofs);
        DenseMatrix l0 = submatrix(sys.l, sys.pt_dofs, sys.u0_dofs);
        auto m1 = a0.matvec(u0);
        auto m2 = l0.matvec(u0);
        for (std::size_t i = 0; i < nu; ++i) ru.momentum[i] = -m1[i];
        for (std::size_t i = 0; i < npt; ++i) ru.continuity[i] = -m2[i];
    }
    // b_p0:  [ +(L^T)_(mom,p0) P0 ; 0 ]
    ReducedRhs rp{std::vector<double>(nu, 0.0), std::vector<double>(npt, 0.0)};
    {
        DenseMatrix l0t = submatrix(sys.l, sys.p0_dofs, sys.ut_dofs).transposed();
        rp.momentum = l0t.matvec(p0);
    }

    SaddleSolution sol;
    sol.saddle_dim = nu + npt;
    double residual = 0.0;
    std::size_t rank = 0;
    std::vector<double> zf = solve_reduced(sys, rf, &rank, &residual);
    std::vector<double> zg = solve_reduced(sys, rg, nullptr, &residual);
    std::vector<double> zu = solve_reduced(sys, ru, nullptr, &residual);
    std::vector<double> zp = solve_reduced(sys, rp, nullptr, &residual);
    sol.rank = rank;
    sol.residual_norm = residual;
    if (require_full_rank && rank < sol.saddle_dim) {
        std::ostringstream msg;
        msg << "saddle system is rank deficient: numeric rank " << rank << " of " << sol.saddle_dim;
        fail(ErrorCode::SingularSystem, msg.str());
    }

    sol.coeffs.b_f = embed(sys, zf, nullptr, nullptr, nullptr);
    sol.coeffs.b_g = embed(sys, zg, nullptr, &g, nullptr);
    sol.coeffs.b_u0 = embed(sys, zu, &u0, nullptr, nullptr);
    sol.coeffs.b_p0 = embed(sys, zp, nullptr, nullptr, &p0);
    return sol;
}

InverseBlocks compute_inverse_blocks(const BlockSystem& sys) {
    std::size_t nu = sys.ut_dofs.size(), npt = sys.pt_dofs.size();
    std::size_t n = nu + npt;
    DenseMatrix pinv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        LstsqResult r = lstsq_min_norm(sys.saddle, e);
        for (std::size_t i = 0; i < n; ++i) pinv(i, j) = r.x[i];
    }
    InverseBlocks blocks;
    blocks.d1 = DenseMatrix(nu, nu);
    blocks.d2 = DenseMatrix(nu, npt);
    blocks.d3 = DenseMatrix(npt, nu);
    blocks.d4 = DenseMatrix(npt, npt);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nu; ++j) blocks.d1(i, j) = pinv(i, j);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < npt; ++j) blocks.d2(i, j) = pinv(i, nu + j);
    for (std::size_t i = 0; i < npt; ++i)
        for (std::size_t j = 0; j < nu; ++j) blocks.d3(i, j) = pinv(nu + i, j);
    for (std::size_t i = 0; i < npt; ++i)
        for (std::size_t j = 0; j < npt; ++j) blocks.d4(i, j) = pinv(nu + i, nu + j);
    return blocks;
}

std::array<double, 3> evaluate_spacetime(const SpaceTimeBasis& basis, const std::vector<double>& coeffs,
                                         Point2 x, double t) {
    require(coeffs.size() == basis.total_dofs(), ErrorCode::InvalidArgument, "coefficient size mismatch");
    auto loc = locate_point(basis.mesh, x);
    if (!loc) fail(ErrorCode::OutOfDomain, "spatial point outside the mesh");
    double t0 = basis.time_nodes.front(), t1 = basis.time_nodes.back();
    if (t < t0 - 1e-12 || t > t1 + 1e-12) fail(ErrorCode::OutOfDomain, "time outside [0, tau]");
    t = std::clamp(t, t0, t1);
    // temporal element containing t
    std::size_t e = 0;
    while (e + 2 < basis.time_nodes.size() && t > basis.time_nodes[e + 1]) ++e;
    double h = basis.time_nodes[e + 1] - basis.time_nodes[e];
    double s = (t - basis.time_nodes[e]) / h;
    double wt[2] = {1.0 - s, s};

    std::size_t nv = basis.velocity_total();
    auto& tri = basis.mesh.triangles[loc->triangle];
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        std::uint32_t node = tri.v[std::size_t(k)];
        double ws = loc->coords[std::size_t(k)];
        for (int a = 0; a < 2; ++a) {
            double wgt = ws * wt[a];
            std::size_t time = e + std::size_t(a);
            out[0] += wgt * coeffs[basis.velocity_dof(0, node, time)];
            out[1] += wgt * coeffs[basis.velocity_dof(1, node, time)];
            out[2] += wgt * coeffs[nv + basis.pressure_dof(node, time)];
        }
    }
    return out;
}

std::array<double, 3> discrete_operator(const SpaceTimeBasis& basis, double rho, double mu,
                                        const std::vector<double>& f, const std::vector<double>& g,
                                        const std::vector<double>& u0, const std::vector<double>& p0,
                                        Point2 x, double t) {
    BlockSystem sys = assemble_blocks(basis, rho, mu);
    SaddleSolution sol = solve_saddle(sys, f, g, u0, p0);
    return evaluate_spacetime(basis, sol.coeffs.total(), x, t);
}

SpacetimeCheckReport run_spacetime_checks(int mesh_n, std::size_t time_nodes, double tau) {
    SpacetimeCheckReport rep;
    std::ostringstream out;
    int failures = 0;
    auto check = [&](const std::string& name, double err, double tol) {
        bool ok = err <= tol;
        if (!ok) ++failures;
        out << (ok ? "[ok]   " : "[FAIL] ") << name << "  error " << err << "  (tol " << tol << ")\n";
    };

    SpaceTimeBasis basis = make_spacetime_basis(build_unit_square_mesh(mesh_n), time_nodes, tau);
    double rho = 1.3, mu = 2.7;
    BlockSystem sys = assemble_blocks(basis, rho, mu);
    out << "space-time instance: " << basis.spatial_count() << " nodes x " << basis.time_count()
        << " time levels, " << basis.total_dofs() << " dofs, saddle dim "
        << (sys.ut_dofs.size() + sys.pt_dofs.size()) << "\n";

    // scaling linearity of W and K
    BlockSystem sys2 = assemble_blocks(basis, 2.0 * rho, mu);
    BlockSystem sys3 = assemble_blocks(basis, rho, 2.0 * mu);
    DenseMatrix werr = sys2.w;
    werr.add_scaled(sys.w, -2.0);
    check("W(2 rho) = 2 W(rho)", werr.max_abs(), 1e-12 * std::max(1.0, sys.w.max_abs()));
    DenseMatrix kerr = sys3.k;
    kerr.add_scaled(sys.k, -2.0);
    check("K(2 mu) = 2 K(mu)", kerr.max_abs(), 1e-12 * std::max(1.0, sys.k.max_abs()));
    DenseMatrix aerr = sys.a;
    aerr.add_scaled(sys.w, -1.0);
    aerr.add_scaled(sys.k, -1.0);
    check("A = W + K", aerr.max_abs(), 0.0);

    // deterministic pseudo-random inputs
    std::vector<double> f(basis.velocity_total()), g(sys.g_dofs.size()), u0(sys.u0_dofs.size()),
        p0(sys.p0_dofs.size());
    std::uint64_t seed = 12345;
    auto next = [&seed]() {
        seed = seed * 6364136223846793005ull + 1442695040888963407ull;
        return double(seed >> 11) * 0x1.0p-53 - 0.5;
    };
    for (auto& v : f) v = next();
    for (auto& v : g) v = next();
    for (auto& v : u0) v = next();
    for (auto& v : p0) v = next();

    SaddleSolution all = solve_saddle(sys, f, g, u0, p0);
    out << "saddle numeric rank " << all.rank << " / " << all.saddle_dim << ", lsq residual "
        << all.residual_norm << "\n";

    // additivity: component vectors sum to the combined solve
    std::vector<double> zero_f(f.size(), 0.0), zero_g(g.size(), 0.0), zero_u(u0.size(), 0.0),
        zero_p(p0.size(), 0.0);
    SaddleSolution only_f = solve_saddle(sys, f, zero_g, zero_u, zero_p);
    SaddleSolution only_g = solve_saddle(sys, zero_f, g, zero_u, zero_p);
    SaddleSolution only_u = solve_saddle(sys, zero_f, zero_g, u0, zero_p);
    SaddleSolution only_p = solve_saddle(sys, zero_f, zero_g, zero_u, p0);
    double add_err = 0.0;
    auto total = all.coeffs.total();
    for (std::size_t i = 0; i < total.size(); ++i) {
        double sum = only_f.coeffs.b_f[i] + only_g.coeffs.b_g[i] + only_u.coeffs.b_u0[i] +
                     only_p.coeffs.b_p0[i];
        add_err = std::max(add_err, std::abs(total[i] - sum));
    }
    double scale = 0.0;
    for (double v : total) scale = std::max(scale, std::abs(v));
    check("additivity b_f+b_g+b_u0+b_p0", add_err, 1e-10 * std::max(1.0, scale));

    // superposition in (F, G)
    SaddleSolution fg = solve_saddle(sys, f, g, zero_u, zero_p);
    double sup_err = 0.0;
    auto fg_total = fg.coeffs.total();
    auto f_total = only_f.coeffs.total();
    auto g_total = only_g.coeffs.total();
    for (std::size_t i = 0; i < fg_total.size(); ++i)
        sup_err = std::max(sup_err, std::abs(fg_total[i] - f_total[i] - g_total[i]));
    check("superposition solve(F,G) = solve(F)+solve(G)", sup_err, 1e-10 * std::max(1.0, scale));

    // homogeneous problem
    SaddleSolution zero = solve_saddle(sys, zero_f, zero_g, zero_u, zero_p);
    double zerr = 0.0;
    for (double v : zero.coeffs.total()) zerr = std::max(zerr, std::abs(v));
    check("zero inputs give zero coefficients", zerr, 0.0);

    rep.failures = failures;
    out << (failures == 0 ? "all space-time checks passed\n"
                          : std::to_string(failures) + " space-time checks FAILED\n");
    rep.text = out.str();
    return rep;
}

} // namespace vmn
