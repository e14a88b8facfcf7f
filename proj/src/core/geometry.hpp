#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vmn {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

enum class BoundaryTag : std::uint32_t {
    Lid = 0,
    Wall = 1,
    Inlet = 2,
    Outlet = 3,
    Cylinder = 4,
    SymmetryAxis = 5,
};

const char* to_string(BoundaryTag tag);

struct Triangle {
    std::array<std::uint32_t, 3> v{};
};

struct BoundaryEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    BoundaryTag tag = BoundaryTag::Wall;
};

// Immutable after construction; safe to share read-only across threads.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }

    double signed_area(std::size_t tri) const;
    double total_area() const;
    std::size_t unique_edge_count() const;
    // V - E + T: 1 for simply connected meshes, 0 with one hole.
    long euler_characteristic_value() const;
    std::vector<std::uint32_t> boundary_vertices() const;

    // Throws on violated mesh invariants (orientation, boundary manifoldness,
    // tag coverage).
    void validate() const;

    Point2 bbox_min() const;
    Point2 bbox_max() const;
};

// Structured crossed-diagonal triangulation of the unit square.
// Top edge tagged Lid, the others Wall.
Mesh build_unit_square_mesh(int n);

// Rectangular channel minus a disk. The disk boundary is approximated by a
// polygon whose vertices lie on the circle with spacing <= target_h.
// Tags: Inlet (x=0), Outlet (x=length), Wall (y=0, y=height), Cylinder.
Mesh build_channel_cylinder_mesh(double length, double height, Point2 cyl_center, double cyl_radius,
                                 double target_h);

// Half of a step-contraction domain (above the symmetry axis):
// [0,inlet_length]x[0,inlet_height] joined to
// [inlet_length, inlet_length+outlet_length]x[0,outlet_height].
// Tags: Inlet (x=0), Outlet (right end), SymmetryAxis (y=0), Wall (profile).
Mesh build_contraction_mesh(double inlet_height, double outlet_height, double inlet_length,
                            double outlet_length, double target_h);

struct Barycentric {
    std::size_t triangle = 0;
    std::array<double, 3> coords{};
};

// Linear scan point location; returns nullopt when outside.
std::optional<Barycentric> locate_point(const Mesh& mesh, Point2 p);

// Uniform-bin accelerator for repeated queries on the same mesh.
class PointLocator {
  public:
    explicit PointLocator(const Mesh& mesh, int bins_per_axis = 32);
    std::optional<Barycentric> locate(Point2 p) const;

  private:
    const Mesh& mesh_;
    Point2 lo_, hi_;
    int nx_, ny_;
    std::vector<std::vector<std::uint32_t>> bins_;
};

struct OutputLattice {
    std::vector<Point2> points;       // retained (inside) lattice points
    std::vector<double> times;        // strictly increasing, > 0
    std::vector<std::uint8_t> membership_mask; // per full-lattice cell flag, row-major
    // grid metadata for quadrature
    int nx = 0, ny = 0;
    Point2 bbox_lo{}, bbox_hi{};

    std::size_t point_count() const { return points.size(); }
    std::size_t time_count() const { return times.size(); }
};

// Cell-centered nx x ny lattice over the mesh bounding box, filtered to
// points strictly inside the fluid domain.
OutputLattice build_output_lattice(const Mesh& mesh, int nx, int ny, const std::vector<double>& times);

// Versioned binary format and a JSON debug export.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);
std::string mesh_to_json(const Mesh& mesh);

} // namespace vmn
