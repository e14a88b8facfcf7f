#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/assembly.hpp"
#include "core/geometry.hpp"
#include "core/sparse.hpp"

namespace vmn {

struct FluidParams {
    double rho = 1.0;
    double mu = 1.0;
};

enum class VelocityBcKind {
    NoSlip,       // u = 0
    LidProfile,   // u = (lid_profile(amplitude, x, t), 0)
    SymmetryAxis, // u.y = 0, u.x free
    Open,         // natural boundary, no velocity constraint
};

struct BoundaryCondition {
    VelocityBcKind kind = VelocityBcKind::NoSlip;
    double amplitude = 0.0;
};

using SpaceTimeField2 = std::function<std::array<double, 2>(double x, double y, double t)>;
using SpaceField2 = std::function<std::array<double, 2>(double x, double y)>;
using SpaceField1 = std::function<double(double x, double y)>;

struct ProblemInputs {
    FluidParams params;
    SpaceTimeField2 body_force; // null -> zero
    SpaceField2 initial_velocity; // null -> zero
    SpaceField1 initial_pressure; // null -> zero
    std::map<BoundaryTag, BoundaryCondition> boundary_spec; // must cover all mesh tags
};

struct SolverConfig {
    double dt = 1e-3;
    double tau = 1.0;
    double linear_tol = 1e-10;
    std::size_t max_iter = 20000;
};

struct Trajectory {
    std::vector<double> times;                         // frame 0 at t = 0
    std::vector<std::vector<double>> velocity_frames;  // each 2N, component-blocked
    std::vector<std::vector<double>> pressure_frames;  // each N
    FluidParams params;
    double dt = 0.0;
    double tau = 0.0;

    std::size_t frame_count() const { return times.size(); }
    // index of the stored frame nearest to t
    std::size_t frame_near(double t) const;
};

// Lid velocity 8*f*(1 + tanh(8*(t - 0.5))) * x1^2 * (1 - x1)^2.
double lid_profile(double f, double x1, double t);

// The velocity Dirichlet set induced by the boundary spec (used by the solver
// and exposed for tests). Per node: no-slip wins over lid profile, which wins
// over the symmetry condition.
DirichletSet velocity_dirichlet(const Mesh& mesh, const DofMap& dofmap,
                                const std::map<BoundaryTag, BoundaryCondition>& spec);

// Pressure constraint used by the projection step: zero at Outlet nodes when
// the mesh has an open outlet, otherwise a single pinned dof.
DirichletSet pressure_dirichlet(const Mesh& mesh,
                                const std::map<BoundaryTag, BoundaryCondition>& spec);

// Incremental pressure-correction time stepping: implicit viscous momentum
// with the previous pressure gradient, a pressure-increment Poisson solve,
// then a velocity projection update.
Trajectory solve_transient(const Mesh& mesh, const DofMap& dofmap, const ProblemInputs& inputs,
                           const SolverConfig& config);

// P1 interpolation of one stored frame at a point; throws OutOfDomain outside.
std::array<double, 3> evaluate_field(const Mesh& mesh, const DofMap& dofmap,
                                     const std::vector<double>& velocity,
                                     const std::vector<double>& pressure, Point2 p);
// hot-path variant with precomputed location
std::array<double, 3> evaluate_frame_at(const Mesh& mesh, const DofMap& dofmap,
                                        const std::vector<double>& velocity,
                                        const std::vector<double>& pressure, const Barycentric& loc);

void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

} // namespace vmn
