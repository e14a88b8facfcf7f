#include "core/ipcs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace vmn {

double lid_profile(double f, double x1, double t) {
    require(x1 >= 0.0 && x1 <= 1.0, ErrorCode::InvalidArgument, "lid coordinate outside [0,1]");
    double s = x1 * (1.0 - x1);
    return 8.0 * f * (1.0 + std::tanh(8.0 * (t - 0.5))) * s * s;
}

std::size_t Trajectory::frame_near(double t) const {
    if (times.empty()) return 0;
    std::size_t best = 0;
    double dist = std::abs(times[0] - t);
    for (std::size_t i = 1; i < times.size(); ++i) {
        double d = std::abs(times[i] - t);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

DirichletSet velocity_dirichlet(const Mesh& mesh, const DofMap& dofmap,
                                const std::map<BoundaryTag, BoundaryCondition>& spec) {
    // tag set per node
    std::map<std::uint32_t, std::set<BoundaryTag>> node_tags;
    for (auto& e : mesh.boundary_edges) {
        node_tags[e.a].insert(e.tag);
        node_tags[e.b].insert(e.tag);
    }
    DirichletSet bc;
    for (auto& [node, tags] : node_tags) {
        bool noslip = false, sym = false;
        bool lid = false;
        double lid_amp = 0.0;
        for (auto tag : tags) {
            auto it = spec.find(tag);
            require(it != spec.end(), ErrorCode::InvalidConfiguration,
                    std::string("no boundary condition for tag ") + to_string(tag));
            switch (it->second.kind) {
                case VelocityBcKind::NoSlip: noslip = true; break;
                case VelocityBcKind::LidProfile:
                    lid = true;
                    lid_amp = it->second.amplitude;
                    break;
                case VelocityBcKind::SymmetryAxis: sym = true; break;
                case VelocityBcKind::Open: break;
            }
        }
        double x1 = mesh.vertices[node].x;
        if (noslip) {
            bc.entries.push_back({std::uint32_t(dofmap.velocity_dof(0, node)), [](double) { return 0.0; }});
            bc.entries.push_back({std::uint32_t(dofmap.velocity_dof(1, node)), [](double) { return 0.0; }});
        } else if (lid) {
            bc.entries.push_back({std::uint32_t(dofmap.velocity_dof(0, node)),
                                  [lid_amp, x1](double t) { return lid_profile(lid_amp, x1, t); }});
            bc.entries.push_back({std::uint32_t(dofmap.velocity_dof(1, node)), [](double) { return 0.0; }});
        } else if (sym) {
            bc.entries.push_back({std::uint32_t(dofmap.velocity_dof(1, node)), [](double) { return 0.0; }});
        }
    }
    return bc;
}

DirichletSet pressure_dirichlet(const Mesh& mesh, const std::map<BoundaryTag, BoundaryCondition>& spec) {
    DirichletSet bc;
    bool has_outlet = false;
    std::set<std::uint32_t> outlet_nodes;
    for (auto& e : mesh.boundary_edges)
        if (e.tag == BoundaryTag::Outlet) {
            has_outlet = true;
            outlet_nodes.insert(e.a);
            outlet_nodes.insert(e.b);
        }
    if (has_outlet) {
        auto it = spec.find(BoundaryTag::Outlet);
        require(it != spec.end() && it->second.kind == VelocityBcKind::Open, ErrorCode::InvalidConfiguration,
                "outlet must be an open boundary");
        for (auto n : outlet_nodes) bc.entries.push_back({n, [](double) { return 0.0; }});
    } else {
        // enclosed flow: pressure defined up to a constant, pin one dof
        bc.entries.push_back({0, [](double) { return 0.0; }});
    }
    return bc;
}

namespace {

std::vector<double> interpolate_velocity(const Mesh& mesh, const DofMap& dofmap, const SpaceField2& f) {
    std::vector<double> v(dofmap.velocity_count(), 0.0);
    if (!f) return v;
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        auto val = f(mesh.vertices[i].x, mesh.vertices[i].y);
        v[dofmap.velocity_dof(0, i)] = val[0];
        v[dofmap.velocity_dof(1, i)] = val[1];
    }
    return v;
}

std::vector<double> interpolate_pressure(const Mesh& mesh, const SpaceField1& f) {
    std::vector<double> p(mesh.vertex_count(), 0.0);
    if (!f) return p;
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) p[i] = f(mesh.vertices[i].x, mesh.vertices[i].y);
    return p;
}

} // namespace

Trajectory solve_transient(const Mesh& mesh, const DofMap& dofmap, const ProblemInputs& inputs,
                           const SolverConfig& config) {
    require(config.dt > 0 && config.dt <= config.tau, ErrorCode::InvalidArgument, "need 0 < dt <= tau");
    require(inputs.params.rho > 0 && inputs.params.mu > 0, ErrorCode::InvalidArgument,
            "fluid parameters must be positive");
    for (auto& e : mesh.boundary_edges)
        require(inputs.boundary_spec.count(e.tag) == 1, ErrorCode::InvalidConfiguration,
                std::string("boundary spec missing tag ") + to_string(e.tag));

    const double rho = inputs.params.rho;
    const double mu = inputs.params.mu;
    const double dt = config.dt;

    CsrMatrix mass_s = assemble_mass(mesh);
    CsrMatrix stiff_s = assemble_stiffness(mesh);
    CsrMatrix mass_v = velocity_block_diag(mass_s);
    CsrMatrix stiff_v = velocity_block_diag(stiff_s);
    CsrMatrix div = assemble_divergence(mesh, dofmap);
    CsrMatrix grad = assemble_gradient(mesh, dofmap);

    // viscous term uses mu * (unit-viscosity stiffness), the mu-Laplacian form
    CsrMatrix momentum = csr_linear_combination(rho / dt, mass_v, mu, stiff_v);

    DirichletSet vel_bc = velocity_dirichlet(mesh, dofmap, inputs.boundary_spec);
    DirichletSet pre_bc = pressure_dirichlet(mesh, inputs.boundary_spec);

    ConstrainedSystem sys_momentum(momentum, vel_bc);
    ConstrainedSystem sys_poisson(stiff_s, pre_bc);
    ConstrainedSystem sys_update(mass_v, vel_bc);

    CgOptions cg{config.linear_tol, config.max_iter};

    std::size_t n2 = dofmap.velocity_count();
    std::size_t np = dofmap.pressure_count();

    Trajectory traj;
    traj.params = inputs.params;
    traj.dt = dt;
    traj.tau = config.tau;

    std::vector<double> u = interpolate_velocity(mesh, dofmap, inputs.initial_velocity);
    std::vector<double> p = interpolate_pressure(mesh, inputs.initial_pressure);
    traj.times.push_back(0.0);
    traj.velocity_frames.push_back(u);
    traj.pressure_frames.push_back(p);

    std::size_t nsteps = std::size_t(std::llround(config.tau / dt));
    if (nsteps == 0) nsteps = 1;

    std::vector<double> force(n2), rhs(n2), tmp(n2), phi(np, 0.0), rhs_p(np), guess(n2);
    for (std::size_t step = 1; step <= nsteps; ++step) {
        double t = double(step) * dt;
        std::vector<double> bvals = vel_bc.evaluate(t);

        // nodal body force at the new time level
        if (inputs.body_force) {
            for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
                auto f = inputs.body_force(mesh.vertices[i].x, mesh.vertices[i].y, t);
                force[dofmap.velocity_dof(0, i)] = f[0];
                force[dofmap.velocity_dof(1, i)] = f[1];
            }
        } else {
            std::fill(force.begin(), force.end(), 0.0);
        }

        // step 1: tentative velocity
        // (rho/dt M + mu K) u* = rho/dt M u^n + M f - G p^n
        mass_v.matvec(u, tmp);
        for (std::size_t i = 0; i < n2; ++i) rhs[i] = (rho / dt) * tmp[i];
        mass_v.matvec(force, tmp);
        for (std::size_t i = 0; i < n2; ++i) rhs[i] += tmp[i];
        grad.matvec(p, tmp);
        for (std::size_t i = 0; i < n2; ++i) rhs[i] -= tmp[i];
        sys_momentum.apply_rhs(rhs, bvals);
        guess = u;
        for (std::size_t i = 0; i < vel_bc.entries.size(); ++i) guess[vel_bc.entries[i].dof] = bvals[i];
        std::vector<double> u_star;
        try {
            u_star = solve_spd(sys_momentum.matrix(), rhs, cg, &guess);
        } catch (const Error& e) {
            fail(e.code(), "momentum solve failed at step " + std::to_string(step) + ": " + e.what());
        }

        // step 2: pressure increment, K phi = -(rho/dt) L u*
        div.matvec(u_star, rhs_p);
        for (std::size_t i = 0; i < np; ++i) rhs_p[i] *= -(rho / dt);
        sys_poisson.apply_rhs(rhs_p, 0.0);
        for (auto& e : pre_bc.entries) phi[e.dof] = 0.0;
        try {
            phi = solve_spd(sys_poisson.matrix(), rhs_p, cg, &phi);
        } catch (const Error& e) {
            fail(e.code(), "pressure solve failed at step " + std::to_string(step) + ": " + e.what());
        }
        for (std::size_t i = 0; i < np; ++i) p[i] += phi[i];

        // step 3: projection, M u^{n+1} = M u* - (dt/rho) G phi
        mass_v.matvec(u_star, rhs);
        grad.matvec(phi, tmp);
        for (std::size_t i = 0; i < n2; ++i) rhs[i] -= (dt / rho) * tmp[i];
        sys_update.apply_rhs(rhs, bvals);
        guess = u_star;
        for (std::size_t i = 0; i < vel_bc.entries.size(); ++i) guess[vel_bc.entries[i].dof] = bvals[i];
        try {
            u = solve_spd(sys_update.matrix(), rhs, cg, &guess);
        } catch (const Error& e) {
            fail(e.code(), "projection solve failed at step " + std::to_string(step) + ": " + e.what());
        }

        traj.times.push_back(t);
        traj.velocity_frames.push_back(u);
        traj.pressure_frames.push_back(p);
    }
    return traj;
}

std::array<double, 3> evaluate_frame_at(const Mesh& mesh, const DofMap& dofmap,
                                        const std::vector<double>& velocity,
                                        const std::vector<double>& pressure, const Barycentric& loc) {
    auto& t = mesh.triangles[loc.triangle];
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        double w = loc.coords[std::size_t(k)];
        std::uint32_t v = t.v[std::size_t(k)];
        out[0] += w * velocity[dofmap.velocity_dof(0, v)];
        out[1] += w * velocity[dofmap.velocity_dof(1, v)];
        out[2] += w * pressure[v];
    }
    return out;
}

std::array<double, 3> evaluate_field(const Mesh& mesh, const DofMap& dofmap,
                                     const std::vector<double>& velocity,
                                     const std::vector<double>& pressure, Point2 p) {
    auto loc = locate_point(mesh, p);
    if (!loc) fail(ErrorCode::OutOfDomain, "evaluation point outside the mesh");
    return evaluate_frame_at(mesh, dofmap, velocity, pressure, *loc);
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    require(!traj.velocity_frames.empty(), ErrorCode::InvalidArgument, "empty trajectory");
    BinWriter w(path);
    w.write_u32(0x4A544D56u); // "VMTJ"
    w.write_u32(1u);
    std::size_t n2 = traj.velocity_frames[0].size();
    std::size_t np = traj.pressure_frames[0].size();
    w.write_u64(n2);
    w.write_u64(np);
    w.write_u64(traj.frame_count());
    w.write_f64(traj.dt);
    w.write_f64(traj.tau);
    w.write_f64(traj.params.rho);
    w.write_f64(traj.params.mu);
    w.write_f64s(traj.times);
    for (std::size_t f = 0; f < traj.frame_count(); ++f) {
        w.write_f64s(traj.velocity_frames[f]);
        w.write_f64s(traj.pressure_frames[f]);
    }
    w.close();
}

Trajectory load_trajectory(const std::string& path) {
    BinReader r(path);
    require(r.read_u32() == 0x4A544D56u, ErrorCode::BadFormat, "not a trajectory file: " + path);
    require(r.read_u32() == 1u, ErrorCode::BadFormat, "unsupported trajectory version");
    Trajectory traj;
    std::size_t n2 = r.read_u64();
    std::size_t np = r.read_u64();
    std::size_t frames = r.read_u64();
    traj.dt = r.read_f64();
    traj.tau = r.read_f64();
    traj.params.rho = r.read_f64();
    traj.params.mu = r.read_f64();
    traj.times = r.read_f64s(frames);
    traj.velocity_frames.reserve(frames);
    traj.pressure_frames.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        traj.velocity_frames.push_back(r.read_f64s(n2));
        traj.pressure_frames.push_back(r.read_f64s(np));
    }
    return traj;
}

} // namespace vmn
