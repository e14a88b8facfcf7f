#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace vmn {

namespace {

double tri_signed_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::pair<std::uint32_t, std::uint32_t> edge_key(std::uint32_t a, std::uint32_t b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Structured crossed-diagonal grid over [x0,x1]x[y0,y1] with explicit
// coordinate lines; diagonals alternate per cell so no direction is favored.
struct GridMesh {
    std::vector<double> xs, ys;
    Mesh mesh;
    std::vector<std::uint32_t> vid; // (j * xs.size() + i) -> vertex index

    void build(const std::vector<double>& x_lines, const std::vector<double>& y_lines) {
        xs = x_lines;
        ys = y_lines;
        vid.resize(xs.size() * ys.size());
        mesh.vertices.reserve(vid.size());
        for (std::size_t j = 0; j < ys.size(); ++j)
            for (std::size_t i = 0; i < xs.size(); ++i) {
                vid[j * xs.size() + i] = std::uint32_t(mesh.vertices.size());
                mesh.vertices.push_back({xs[i], ys[j]});
            }
    }

    std::uint32_t at(std::size_t i, std::size_t j) const { return vid[j * xs.size() + i]; }

    void add_cell(std::size_t i, std::size_t j) {
        std::uint32_t v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
        if ((i + j) % 2 == 0) {
            mesh.triangles.push_back({{v00, v10, v11}});
            mesh.triangles.push_back({{v00, v11, v01}});
        } else {
            mesh.triangles.push_back({{v00, v10, v01}});
            mesh.triangles.push_back({{v10, v11, v01}});
        }
    }
};

std::vector<double> subdivide(double a, double b, int n) {
    std::vector<double> xs(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) xs[std::size_t(i)] = a + (b - a) * double(i) / double(n);
    xs.back() = b;
    return xs;
}

// Drops unreferenced vertices and reindexes triangles.
void compact_vertices(Mesh& m) {
    std::vector<std::uint32_t> remap(m.vertices.size(), UINT32_MAX);
    std::vector<Point2> kept;
    for (auto& t : m.triangles)
        for (auto v : t.v)
            if (remap[v] == UINT32_MAX) {
                remap[v] = std::uint32_t(kept.size());
                kept.push_back(m.vertices[v]);
            }
    for (auto& t : m.triangles)
        for (auto& v : t.v) v = remap[v];
    m.vertices = std::move(kept);
}

// Edges incident to exactly one triangle, in that triangle's orientation.
std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_edge_list(const Mesh& m) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> count;
    for (auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) count[edge_key(t.v[std::size_t(e)], t.v[(std::size_t(e) + 1) % 3])]++;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            auto a = t.v[std::size_t(e)], b = t.v[(std::size_t(e) + 1) % 3];
            if (count[edge_key(a, b)] == 1) out.emplace_back(a, b);
        }
    return out;
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

} // namespace

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Lid: return "Lid";
        case BoundaryTag::Wall: return "Wall";
        case BoundaryTag::Inlet: return "Inlet";
        case BoundaryTag::Outlet: return "Outlet";
        case BoundaryTag::Cylinder: return "Cylinder";
        case BoundaryTag::SymmetryAxis: return "SymmetryAxis";
    }
    return "?";
}

double Mesh::signed_area(std::size_t tri) const {
    auto& t = triangles[tri];
    return tri_signed_area(vertices[t.v[0]], vertices[t.v[1]], vertices[t.v[2]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) s += signed_area(t);
    return s;
}

std::size_t Mesh::unique_edge_count() const {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (auto& t : triangles)
        for (int e = 0; e < 3; ++e) edges.insert(edge_key(t.v[std::size_t(e)], t.v[(std::size_t(e) + 1) % 3]));
    return edges.size();
}

long Mesh::euler_characteristic_value() const {
    return long(vertices.size()) - long(unique_edge_count()) + long(triangles.size());
}

std::vector<std::uint32_t> Mesh::boundary_vertices() const {
    std::set<std::uint32_t> s;
    for (auto& e : boundary_edges) {
        s.insert(e.a);
        s.insert(e.b);
    }
    return {s.begin(), s.end()};
}

void Mesh::validate() const {
    require(!vertices.empty() && !triangles.empty(), ErrorCode::InvalidGeometry, "empty mesh");
    for (auto& p : vertices)
        require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::InvalidGeometry, "non-finite vertex");
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (auto v : triangles[t].v)
            require(v < vertices.size(), ErrorCode::InvalidGeometry, "triangle index out of range");
        require(signed_area(t) > 0.0, ErrorCode::InvalidGeometry, "non-positive triangle area");
    }
    // Boundary tags must cover exactly the topological boundary, once each.
    auto topo = boundary_edge_list(*this);
    std::set<std::pair<std::uint32_t, std::uint32_t>> topo_set;
    for (auto& e : topo) topo_set.insert(edge_key(e.first, e.second));
    std::set<std::pair<std::uint32_t, std::uint32_t>> tagged;
    for (auto& e : boundary_edges) {
        auto k = edge_key(e.a, e.b);
        require(topo_set.count(k) == 1, ErrorCode::InvalidGeometry, "tagged edge is not a boundary edge");
        require(tagged.insert(k).second, ErrorCode::InvalidGeometry, "boundary edge tagged twice");
    }
    require(tagged.size() == topo_set.size(), ErrorCode::InvalidGeometry, "untagged boundary edges");
    // Manifold boundary: every boundary vertex has exactly two incident boundary edges.
    std::map<std::uint32_t, int> deg;
    for (auto& e : boundary_edges) {
        deg[e.a]++;
        deg[e.b]++;
    }
    for (auto& [v, d] : deg)
        require(d == 2, ErrorCode::InvalidGeometry, "non-manifold boundary vertex " + std::to_string(v));
}

Point2 Mesh::bbox_min() const {
    Point2 lo{vertices[0].x, vertices[0].y};
    for (auto& p : vertices) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
    }
    return lo;
}

Point2 Mesh::bbox_max() const {
    Point2 hi{vertices[0].x, vertices[0].y};
    for (auto& p : vertices) {
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    return hi;
}

Mesh build_unit_square_mesh(int n) {
    require(n >= 2, ErrorCode::InvalidArgument, "unit square mesh needs n >= 2");
    GridMesh g;
    g.build(subdivide(0.0, 1.0, n), subdivide(0.0, 1.0, n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g.add_cell(std::size_t(i), std::size_t(j));
    Mesh m = std::move(g.mesh);
    for (auto& [a, b] : boundary_edge_list(m)) {
        bool lid = near(m.vertices[a].y, 1.0, 1e-12) && near(m.vertices[b].y, 1.0, 1e-12);
        m.boundary_edges.push_back({a, b, lid ? BoundaryTag::Lid : BoundaryTag::Wall});
    }
    m.validate();
    return m;
}

Mesh build_channel_cylinder_mesh(double length, double height, Point2 c, double r, double target_h) {
    require(length > 0 && height > 0 && r > 0 && target_h > 0, ErrorCode::InvalidArgument,
            "channel dimensions must be positive");
    if (!(c.x - r > 0 && c.x + r < length && c.y - r > 0 && c.y + r < height))
        fail(ErrorCode::InvalidGeometry, "cylinder touches or crosses the channel boundary");

    // grid spacing target_h/2 keeps the snapped polygon spacing below target_h
    double h = target_h / 2.0;
    int nx = std::max(2, int(std::ceil(length / h)));
    int ny = std::max(2, int(std::ceil(height / h)));
    GridMesh g;
    g.build(subdivide(0.0, length, nx), subdivide(0.0, height, ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) g.add_cell(std::size_t(i), std::size_t(j));

    // carve: drop every triangle that intersects the open disk
    auto dist_point_seg = [](Point2 p, Point2 a, Point2 b) {
        double vx = b.x - a.x, vy = b.y - a.y;
        double wx = p.x - a.x, wy = p.y - a.y;
        double t = (vx * wx + vy * wy) / std::max(vx * vx + vy * vy, 1e-300);
        t = std::clamp(t, 0.0, 1.0);
        double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
        return std::sqrt(dx * dx + dy * dy);
    };
    auto tri_clear_of_disk = [&](const Triangle& t, const std::vector<Point2>& vs) {
        Point2 p0 = vs[t.v[0]], p1 = vs[t.v[1]], p2 = vs[t.v[2]];
        // center inside triangle?
        double s0 = tri_signed_area(p0, p1, c), s1 = tri_signed_area(p1, p2, c), s2 = tri_signed_area(p2, p0, c);
        if (s0 >= 0 && s1 >= 0 && s2 >= 0) return false;
        double d = std::min({dist_point_seg(c, p0, p1), dist_point_seg(c, p1, p2), dist_point_seg(c, p2, p0)});
        return d >= r;
    };
    Mesh m;
    m.vertices = std::move(g.mesh.vertices);
    for (auto& t : g.mesh.triangles)
        if (tri_clear_of_disk(t, m.vertices)) m.triangles.push_back(t);
    compact_vertices(m);

    // snap hole-boundary vertices onto the circle where it keeps orientation
    auto on_rect = [&](Point2 p) {
        return near(p.x, 0.0) || near(p.x, length) || near(p.y, 0.0) || near(p.y, height);
    };
    std::vector<std::vector<std::uint32_t>> v2t(m.vertices.size());
    for (std::uint32_t t = 0; t < m.triangles.size(); ++t)
        for (auto v : m.triangles[t].v) v2t[v].push_back(t);
    std::set<std::uint32_t> hole_verts;
    for (auto& [a, b] : boundary_edge_list(m)) {
        if (!on_rect(m.vertices[a]) || !on_rect(m.vertices[b])) {
            hole_verts.insert(a);
            hole_verts.insert(b);
        }
    }
    double min_area = 0.02 * h * h;
    for (auto v : hole_verts) {
        if (on_rect(m.vertices[v])) continue;
        Point2 old = m.vertices[v];
        double d = std::hypot(old.x - c.x, old.y - c.y);
        if (d <= 0) continue;
        m.vertices[v] = {c.x + r * (old.x - c.x) / d, c.y + r * (old.y - c.y) / d};
        bool ok = true;
        for (auto t : v2t[v])
            if (m.signed_area(t) <= min_area) ok = false;
        if (!ok) m.vertices[v] = old;
    }

    for (auto& [a, b] : boundary_edge_list(m)) {
        Point2 mid{0.5 * (m.vertices[a].x + m.vertices[b].x), 0.5 * (m.vertices[a].y + m.vertices[b].y)};
        BoundaryTag tag;
        if (near(mid.x, 0.0))
            tag = BoundaryTag::Inlet;
        else if (near(mid.x, length))
            tag = BoundaryTag::Outlet;
        else if (near(mid.y, 0.0) || near(mid.y, height))
            tag = BoundaryTag::Wall;
        else
            tag = BoundaryTag::Cylinder;
        m.boundary_edges.push_back({a, b, tag});
    }
    m.validate();
    return m;
}

Mesh build_contraction_mesh(double inlet_height, double outlet_height, double inlet_length,
                            double outlet_length, double target_h) {
    require(inlet_height > 0 && outlet_height > 0 && inlet_length > 0 && outlet_length > 0 && target_h > 0,
            ErrorCode::InvalidArgument, "contraction dimensions must be positive");
    require(outlet_height < inlet_height, ErrorCode::InvalidArgument,
            "outlet height must be smaller than inlet height");

    double h = target_h;
    auto lines = [&](double a, double b) { return std::max(1, int(std::ceil((b - a) / h))); };
    std::vector<double> xs = subdivide(0.0, inlet_length, lines(0.0, inlet_length));
    {
        auto right = subdivide(inlet_length, inlet_length + outlet_length, lines(inlet_length, inlet_length + outlet_length));
        xs.insert(xs.end(), right.begin() + 1, right.end());
    }
    std::vector<double> ys = subdivide(0.0, outlet_height, lines(0.0, outlet_height));
    {
        auto top = subdivide(outlet_height, inlet_height, lines(outlet_height, inlet_height));
        ys.insert(ys.end(), top.begin() + 1, top.end());
    }

    GridMesh g;
    g.build(xs, ys);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j)
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            double cx = 0.5 * (xs[i] + xs[i + 1]), cy = 0.5 * (ys[j] + ys[j + 1]);
            if (cx > inlet_length && cy > outlet_height) continue; // removed step corner
            g.add_cell(i, j);
        }
    Mesh m = std::move(g.mesh);
    compact_vertices(m);

    double total_length = inlet_length + outlet_length;
    for (auto& [a, b] : boundary_edge_list(m)) {
        Point2 mid{0.5 * (m.vertices[a].x + m.vertices[b].x), 0.5 * (m.vertices[a].y + m.vertices[b].y)};
        BoundaryTag tag;
        if (near(mid.y, 0.0))
            tag = BoundaryTag::SymmetryAxis;
        else if (near(mid.x, 0.0))
            tag = BoundaryTag::Inlet;
        else if (near(mid.x, total_length))
            tag = BoundaryTag::Outlet;
        else
            tag = BoundaryTag::Wall;
        m.boundary_edges.push_back({a, b, tag});
    }
    m.validate();
    return m;
}

namespace {

std::optional<Barycentric> bary_in_triangle(const Mesh& mesh, std::size_t t, Point2 p) {
    auto& tr = mesh.triangles[t];
    Point2 a = mesh.vertices[tr.v[0]], b = mesh.vertices[tr.v[1]], c = mesh.vertices[tr.v[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (det == 0.0) return std::nullopt;
    double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    double l0 = 1.0 - l1 - l2;
    const double tol = 1e-12;
    if (l0 < -tol || l1 < -tol || l2 < -tol) return std::nullopt;
    Barycentric out;
    out.triangle = t;
    out.coords = {std::max(l0, 0.0), std::max(l1, 0.0), std::max(l2, 0.0)};
    return out;
}

} // namespace

std::optional<Barycentric> locate_point(const Mesh& mesh, Point2 p) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (auto hit = bary_in_triangle(mesh, t, p)) return hit;
    return std::nullopt;
}

PointLocator::PointLocator(const Mesh& mesh, int bins_per_axis) : mesh_(mesh) {
    lo_ = mesh.bbox_min();
    hi_ = mesh.bbox_max();
    nx_ = std::max(1, bins_per_axis);
    ny_ = std::max(1, bins_per_axis);
    bins_.resize(std::size_t(nx_) * std::size_t(ny_));
    auto bin_of = [&](double v, double lo, double hi, int n) {
        int b = int(double(n) * (v - lo) / std::max(hi - lo, 1e-300));
        return std::clamp(b, 0, n - 1);
    };
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
        auto& tr = mesh.triangles[t];
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (auto v : tr.v) {
            x0 = std::min(x0, mesh.vertices[v].x);
            x1 = std::max(x1, mesh.vertices[v].x);
            y0 = std::min(y0, mesh.vertices[v].y);
            y1 = std::max(y1, mesh.vertices[v].y);
        }
        int ix0 = bin_of(x0, lo_.x, hi_.x, nx_), ix1 = bin_of(x1, lo_.x, hi_.x, nx_);
        int iy0 = bin_of(y0, lo_.y, hi_.y, ny_), iy1 = bin_of(y1, lo_.y, hi_.y, ny_);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) bins_[std::size_t(iy) * std::size_t(nx_) + std::size_t(ix)].push_back(t);
    }
}

std::optional<Barycentric> PointLocator::locate(Point2 p) const {
    if (p.x < lo_.x || p.x > hi_.x || p.y < lo_.y || p.y > hi_.y) return std::nullopt;
    auto bin_of = [&](double v, double lo, double hi, int n) {
        int b = int(double(n) * (v - lo) / std::max(hi - lo, 1e-300));
        return std::clamp(b, 0, n - 1);
    };
    int ix = bin_of(p.x, lo_.x, hi_.x, nx_), iy = bin_of(p.y, lo_.y, hi_.y, ny_);
    for (auto t : bins_[std::size_t(iy) * std::size_t(nx_) + std::size_t(ix)])
        if (auto hit = bary_in_triangle(mesh_, t, p)) return hit;
    return std::nullopt;
}

OutputLattice build_output_lattice(const Mesh& mesh, int nx, int ny, const std::vector<double>& times) {
    require(nx >= 2 && ny >= 2, ErrorCode::InvalidArgument, "lattice needs nx, ny >= 2");
    require(!times.empty(), ErrorCode::InvalidArgument, "lattice needs at least one time");
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(times[i] > 0, ErrorCode::InvalidArgument, "lattice times must be positive");
        if (i > 0) require(times[i] > times[i - 1], ErrorCode::InvalidArgument, "lattice times must increase");
    }
    OutputLattice lat;
    lat.nx = nx;
    lat.ny = ny;
    lat.bbox_lo = mesh.bbox_min();
    lat.bbox_hi = mesh.bbox_max();
    lat.times = times;
    lat.membership_mask.assign(std::size_t(nx) * std::size_t(ny), 0);

    PointLocator locator(mesh);
    double dx = (lat.bbox_hi.x - lat.bbox_lo.x) / nx;
    double dy = (lat.bbox_hi.y - lat.bbox_lo.y) / ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Point2 p{lat.bbox_lo.x + (i + 0.5) * dx, lat.bbox_lo.y + (j + 0.5) * dy};
            if (locator.locate(p)) {
                lat.membership_mask[std::size_t(j) * std::size_t(nx) + std::size_t(i)] = 1;
                lat.points.push_back(p);
            }
        }
    require(!lat.points.empty(), ErrorCode::InvalidConfiguration, "output lattice is empty");
    return lat;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    BinWriter w(path);
    w.write_u32(0x48534D56u); // "VMSH"
    w.write_u32(1u);
    w.write_u64(mesh.vertices.size());
    w.write_u64(mesh.triangles.size());
    w.write_u64(mesh.boundary_edges.size());
    for (auto& p : mesh.vertices) {
        w.write_f64(p.x);
        w.write_f64(p.y);
    }
    for (auto& t : mesh.triangles)
        for (auto v : t.v) w.write_u32(v);
    for (auto& e : mesh.boundary_edges) {
        w.write_u32(e.a);
        w.write_u32(e.b);
        w.write_u32(std::uint32_t(e.tag));
    }
    w.close();
}

Mesh load_mesh(const std::string& path) {
    BinReader r(path);
    require(r.read_u32() == 0x48534D56u, ErrorCode::BadFormat, "not a mesh file: " + path);
    require(r.read_u32() == 1u, ErrorCode::BadFormat, "unsupported mesh version: " + path);
    Mesh m;
    std::uint64_t nv = r.read_u64(), nt = r.read_u64(), nb = r.read_u64();
    m.vertices.resize(nv);
    for (auto& p : m.vertices) {
        p.x = r.read_f64();
        p.y = r.read_f64();
    }
    m.triangles.resize(nt);
    for (auto& t : m.triangles)
        for (auto& v : t.v) v = r.read_u32();
    m.boundary_edges.resize(nb);
    for (auto& e : m.boundary_edges) {
        e.a = r.read_u32();
        e.b = r.read_u32();
        e.tag = BoundaryTag(r.read_u32());
    }
    m.validate();
    return m;
}

std::string mesh_to_json(const Mesh& mesh) {
    nlohmann::json j;
    for (auto& p : mesh.vertices) j["vertices"].push_back({p.x, p.y});
    for (auto& t : mesh.triangles) j["triangles"].push_back({t.v[0], t.v[1], t.v[2]});
    for (auto& e : mesh.boundary_edges)
        j["boundary_edges"].push_back({{"v", {e.a, e.b}}, {"tag", to_string(e.tag)}});
    return j.dump(2);
}

} // namespace vmn
