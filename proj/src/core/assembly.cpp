#include "core/assembly.hpp"

#include "core/errors.hpp"

namespace vmn {

namespace {

struct ElementGeometry {
    double area;
    // grad phi_i = (bx[i], by[i]), constant per triangle
    double bx[3], by[3];
};

ElementGeometry element_geometry(const Mesh& mesh, const Triangle& t) {
    Point2 p0 = mesh.vertices[t.v[0]], p1 = mesh.vertices[t.v[1]], p2 = mesh.vertices[t.v[2]];
    double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    ElementGeometry g;
    g.area = 0.5 * det;
    g.bx[0] = (p1.y - p2.y) / det;
    g.by[0] = (p2.x - p1.x) / det;
    g.bx[1] = (p2.y - p0.y) / det;
    g.by[1] = (p0.x - p2.x) / det;
    g.bx[2] = (p0.y - p1.y) / det;
    g.by[2] = (p1.x - p0.x) / det;
    return g;
}

} // namespace

DofMap make_dofmap(const Mesh& mesh) { return DofMap{mesh.vertex_count()}; }

CsrMatrix assemble_mass(const Mesh& mesh) {
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    ti.reserve(mesh.triangles.size() * 9);
    tj.reserve(mesh.triangles.size() * 9);
    tv.reserve(mesh.triangles.size() * 9);
    for (auto& t : mesh.triangles) {
        double area = element_geometry(mesh, t).area;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ti.push_back(t.v[std::size_t(i)]);
                tj.push_back(t.v[std::size_t(j)]);
                tv.push_back(area / 12.0 * (i == j ? 2.0 : 1.0));
            }
    }
    std::size_t n = mesh.vertex_count();
    return CsrMatrix::from_triplets(n, n, std::move(ti), std::move(tj), std::move(tv));
}

CsrMatrix assemble_stiffness(const Mesh& mesh) {
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    ti.reserve(mesh.triangles.size() * 9);
    tj.reserve(mesh.triangles.size() * 9);
    tv.reserve(mesh.triangles.size() * 9);
    for (auto& t : mesh.triangles) {
        ElementGeometry g = element_geometry(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ti.push_back(t.v[std::size_t(i)]);
                tj.push_back(t.v[std::size_t(j)]);
                tv.push_back(g.area * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]));
            }
    }
    std::size_t n = mesh.vertex_count();
    return CsrMatrix::from_triplets(n, n, std::move(ti), std::move(tj), std::move(tv));
}

CsrMatrix assemble_divergence(const Mesh& mesh, const DofMap& dofmap) {
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    for (auto& t : mesh.triangles) {
        ElementGeometry g = element_geometry(mesh, t);
        // (phi_q, d_c phi_j) = area/3 * grad_c(phi_j), independent of q within the element
        for (int q = 0; q < 3; ++q)
            for (int j = 0; j < 3; ++j) {
                for (int c = 0; c < 2; ++c) {
                    ti.push_back(t.v[std::size_t(q)]);
                    tj.push_back(std::uint32_t(dofmap.velocity_dof(c, t.v[std::size_t(j)])));
                    tv.push_back(g.area / 3.0 * (c == 0 ? g.bx[j] : g.by[j]));
                }
            }
    }
    return CsrMatrix::from_triplets(dofmap.pressure_count(), dofmap.velocity_count(), std::move(ti),
                                    std::move(tj), std::move(tv));
}

CsrMatrix assemble_gradient(const Mesh& mesh, const DofMap& dofmap) {
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    for (auto& t : mesh.triangles) {
        ElementGeometry g = element_geometry(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int q = 0; q < 3; ++q)
                for (int c = 0; c < 2; ++c) {
                    ti.push_back(std::uint32_t(dofmap.velocity_dof(c, t.v[std::size_t(i)])));
                    tj.push_back(t.v[std::size_t(q)]);
                    tv.push_back(g.area / 3.0 * (c == 0 ? g.bx[q] : g.by[q]));
                }
    }
    return CsrMatrix::from_triplets(dofmap.velocity_count(), dofmap.pressure_count(), std::move(ti),
                                    std::move(tj), std::move(tv));
}

CsrMatrix velocity_block_diag(const CsrMatrix& scalar) {
    std::size_t n = scalar.rows();
    require(scalar.cols() == n, ErrorCode::InvalidArgument, "scalar block must be square");
    std::vector<std::uint32_t> ti, tj;
    std::vector<double> tv;
    ti.reserve(2 * scalar.nnz());
    tj.reserve(2 * scalar.nnz());
    tv.reserve(2 * scalar.nnz());
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < n; ++i)
            for (std::uint64_t k = scalar.row_offsets()[i]; k < scalar.row_offsets()[i + 1]; ++k) {
                ti.push_back(std::uint32_t(c * n + i));
                tj.push_back(std::uint32_t(c * n + scalar.column_indices()[k]));
                tv.push_back(scalar.values()[k]);
            }
    return CsrMatrix::from_triplets(2 * n, 2 * n, std::move(ti), std::move(tj), std::move(tv));
}

std::vector<double> lumped_vertex_areas(const Mesh& mesh) {
    std::vector<double> areas(mesh.vertex_count(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        double third = mesh.signed_area(t) / 3.0;
        for (auto v : mesh.triangles[t].v) areas[v] += third;
    }
    return areas;
}

} // namespace vmn
