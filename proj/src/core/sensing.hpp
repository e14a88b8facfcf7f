#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/ipcs.hpp"
#include "core/rng.hpp"

namespace vmn {

// Sensor nodes at which the input fields are read off.
struct SensorLayout {
    std::vector<double> time_nodes;    // r values in (0, tau]
    std::vector<Point2> interior_nodes; // k points inside the domain
    std::vector<Point2> boundary_nodes; // k' points on the boundary

    std::size_t r() const { return time_nodes.size(); }
    std::size_t k() const { return interior_nodes.size(); }
    std::size_t k_prime() const { return boundary_nodes.size(); }
    void validate() const;
};

// Sensed network inputs. Component-blocked layout throughout: for F_hat all
// x-readings over (time-major, node-minor) pairs first, then all y-readings.
struct SensedSample {
    double rho = 1.0;
    double mu = 1.0;
    double forcing_amplitude = 0.0; // experiment scalar f (lid or body force)
    std::vector<double> f_hat;  // 2*k*r
    std::vector<double> u0_hat; // 2*k
    std::vector<double> p0_hat; // k
    std::vector<double> g_hat;  // 2*k'*r
};

// Target values on the shared output lattice, (u1,u2,p) per (point, time),
// time-major: index = (i_time * L + l_point) * 3 + component.
struct TargetSample {
    std::vector<double> values;
};

struct DatasetRecord {
    SensedSample sensed;
    TargetSample target;
    std::uint64_t seed = 0;
};

enum class Geometry { Cavity = 0, Cylinder = 1, Contraction = 2 };
const char* to_string(Geometry g);
std::optional<Geometry> geometry_from_string(const std::string& s);

struct Dataset {
    Geometry geometry = Geometry::Cavity;
    double tau = 0.0;
    double dt = 0.0;
    SensorLayout layout;
    OutputLattice lattice;
    std::vector<double> weights; // quadrature weights, same indexing as targets/3
    std::vector<DatasetRecord> records;
    std::uint64_t master_seed = 0;

    std::size_t sample_count() const; // J * L * M
};

// Fields of one problem instance, evaluated at the sensor nodes.
struct InstanceFields {
    SpaceTimeField2 body_force;     // may be null (zero)
    SpaceField2 initial_velocity;   // may be null
    SpaceField1 initial_pressure;   // may be null
    SpaceTimeField2 boundary_value; // may be null; evaluated at boundary nodes
};

SensedSample sense(const FluidParams& params, double forcing_amplitude, const InstanceFields& fields,
                   const SensorLayout& layout);

// Uniform (mu, forcing amplitude) draws in the experiment ranges.
std::pair<double, double> sample_parameters(Rng& rng, Geometry geometry);

// Tensor-product weights: lattice cell area times time-slice width, masked to
// the retained interior points. Their sum approximates tau * |Omega|.
std::vector<double> quadrature_weights(const OutputLattice& lattice);

struct GenerateOptions {
    Geometry geometry = Geometry::Cavity;
    std::size_t instances = 10; // J
    std::uint64_t seed = 7;
    // overrides for testing; zero/empty means per-geometry default
    int mesh_n = 0;           // cavity subdivisions
    double target_h = 0.0;    // cylinder/contraction resolution
    double dt = 0.0;
    double tau = 0.0;
    int lattice_nx = 0, lattice_ny = 0;
    int output_times = 0;     // M
    int sensor_time_nodes = 0; // r
    int boundary_sensors = 0;  // k'
    bool zero_forcing = false; // draws mu but forces amplitude 0
    double linear_tol = 1e-10;
};

// Steps: draw parameters, solve the transient problem, read off sensors,
// sample the solution on the lattice, store the record. Solver failures skip
// the record with a logged reason.
Dataset generate_dataset(const GenerateOptions& options);

struct SplitIndices {
    std::vector<std::size_t> train, validation, test;
};
// Disjoint record-level partition; deterministic under a fixed seed.
SplitIndices split_dataset(const Dataset& dataset, double train_fraction, double validation_fraction,
                           double test_fraction, std::uint64_t seed);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

// Mesh and problem construction shared with the CLI and evaluation paths.
struct ExperimentSetup {
    Mesh mesh;
    DofMap dofmap;
    SolverConfig solver;
    SensorLayout layout;
    OutputLattice lattice;
    std::vector<double> weights;
};
ExperimentSetup make_experiment_setup(const GenerateOptions& options);

// Problem inputs for one (mu, amplitude) draw of the experiment family.
ProblemInputs make_instance_inputs(Geometry geometry, double mu, double amplitude);
InstanceFields make_instance_fields(Geometry geometry, double amplitude);

} // namespace vmn
