#include "mmrve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mmrve {

const std::array<std::array<double, 3>, 8> kHexVertexRef = {{
    {-1, -1, -1}, {+1, -1, -1}, {+1, +1, -1}, {-1, +1, -1},
    {-1, -1, +1}, {+1, -1, +1}, {+1, +1, +1}, {-1, +1, +1},
}};

// Four x-edges, four y-edges, four z-edges; each directed along the +axis.
const std::array<std::array<int, 2>, 12> kHexEdgeVertices = {{
    {0, 1}, {3, 2}, {4, 5}, {7, 6},  // x
    {0, 3}, {1, 2}, {4, 7}, {5, 6},  // y
    {0, 4}, {1, 5}, {3, 7}, {2, 6},  // z
}};

const std::array<int, 12> kHexEdgeAxis = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};

namespace {

// Minimum-image displacement between two points of the periodic cell.
Vec3 min_image(const Vec3& d, const Vec3& L) {
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = std::remainder(d[k], L[k]);
    return out;
}

} // namespace

int Mesh::edge_id(int v1, int v2) const {
    const int lo = std::min(v1, v2), hi = std::max(v1, v2);
    auto a = vertex_index(lo);
    auto b = vertex_index(hi);
    int axis = -1;
    for (int k = 0; k < 3; ++k) {
        if (b[k] == a[k] + 1 && b[(k + 1) % 3] == a[(k + 1) % 3] && b[(k + 2) % 3] == a[(k + 2) % 3])
            axis = k;
    }
    if (axis < 0) return -1;
    const int nx = n[0], ny = n[1], nz = n[2];
    const int count_x = nx * (ny + 1) * (nz + 1);
    const int count_y = (nx + 1) * ny * (nz + 1);
    switch (axis) {
        case 0: return a[0] + nx * (a[1] + (ny + 1) * a[2]);
        case 1: return count_x + a[1] + ny * (a[0] + (nx + 1) * a[2]);
        default: return count_x + count_y + a[2] + nz * (a[0] + (nx + 1) * a[1]);
    }
}

Mesh build_rve_mesh(const std::array<int, 3>& n, const Vec3& L,
                    const std::vector<Inclusion>& inclusions) {
    for (int k = 0; k < 3; ++k)
        if (n[k] < 2) throw GeometryError("build_rve_mesh: need at least 2 cells per axis");
    for (int k = 0; k < 3; ++k)
        if (!(L[k] > 0.0)) throw GeometryError("build_rve_mesh: domain lengths must be positive");
    for (const auto& inc : inclusions)
        if (!(inc.radius > 0.0)) throw GeometryError("build_rve_mesh: inclusion radius must be positive");

    for (size_t a = 0; a < inclusions.size(); ++a)
        for (size_t b = a + 1; b < inclusions.size(); ++b) {
            const double d = min_image(inclusions[a].center - inclusions[b].center, L).norm();
            if (d + 1e-12 < inclusions[a].radius + inclusions[b].radius) {
                std::ostringstream os;
                os << "build_rve_mesh: inclusions " << a << " and " << b
                   << " overlap (periodic distance " << d << ")";
                throw GeometryError(os.str());
            }
        }

    Mesh m;
    m.n = n;
    m.L = L;
    const int nx = n[0], ny = n[1], nz = n[2];
    const Vec3 h = {L[0] / nx, L[1] / ny, L[2] / nz};

    m.vertices.reserve((nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                m.vertices.push_back(Vec3(i * h[0], j * h[1], k * h[2]));

    // edges, grouped x|y|z to match edge_id()
    m.edges.reserve(nx * (ny + 1) * (nz + 1) + (nx + 1) * ny * (nz + 1) + (nx + 1) * (ny + 1) * nz);
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i)
                m.edges.push_back({m.vertex_id(i, j, k), m.vertex_id(i + 1, j, k)});
    for (int k = 0; k <= nz; ++k)
        for (int i = 0; i <= nx; ++i)
            for (int j = 0; j < ny; ++j)
                m.edges.push_back({m.vertex_id(i, j, k), m.vertex_id(i, j + 1, k)});
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            for (int k = 0; k < nz; ++k)
                m.edges.push_back({m.vertex_id(i, j, k), m.vertex_id(i, j, k + 1)});

    int particle_cells = 0;
    m.cells.reserve(nx * ny * nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::array<int, 8> c = {
                    m.vertex_id(i, j, k),         m.vertex_id(i + 1, j, k),
                    m.vertex_id(i + 1, j + 1, k), m.vertex_id(i, j + 1, k),
                    m.vertex_id(i, j, k + 1),     m.vertex_id(i + 1, j, k + 1),
                    m.vertex_id(i + 1, j + 1, k + 1), m.vertex_id(i, j + 1, k + 1)};
                m.cells.push_back(c);

                std::array<int, 12> ce{};
                std::array<int, 12> cs{};
                for (int e = 0; e < 12; ++e) {
                    const int va = c[kHexEdgeVertices[e][0]];
                    const int vb = c[kHexEdgeVertices[e][1]];
                    ce[e] = m.edge_id(va, vb);
                    cs[e] = (va < vb) ? +1 : -1;
                }
                m.cell_edges.push_back(ce);
                m.cell_edge_signs.push_back(cs);

                const Vec3 centroid((i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
                Phase ph = Phase::Matrix;
                for (const auto& inc : inclusions) {
                    const double d2 = min_image(centroid - inc.center, L).squaredNorm();
                    if (d2 <= inc.radius * inc.radius) { ph = Phase::Particle; break; }
                }
                if (ph == Phase::Particle) ++particle_cells;
                m.phase.push_back(ph);
            }

    m.voxel_volume_fraction = double(particle_cells) / double(m.n_cells());
    double v_inc = 0.0;
    for (const auto& inc : inclusions)
        v_inc += 4.0 / 3.0 * std::numbers::pi * std::pow(inc.radius, 3);
    m.analytic_volume_fraction = v_inc / (L[0] * L[1] * L[2]);
    return m;
}

FacePairing pair_periodic_entities(const Mesh& mesh) {
    FacePairing fp;
    const auto& n = mesh.n;

    for (int axis = 0; axis < 3; ++axis) {
        // vertices on the + face
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            auto idx = mesh.vertex_index(v);
            if (idx[axis] != n[axis]) continue;
            auto lid = idx;
            lid[axis] = 0;
            fp.vertex_pairs[axis].push_back({v, mesh.vertex_id(lid[0], lid[1], lid[2])});
        }
        // edges contained in the + face
        for (int e = 0; e < mesh.n_edges(); ++e) {
            auto a = mesh.vertex_index(mesh.edges[e][0]);
            auto b = mesh.vertex_index(mesh.edges[e][1]);
            if (a[axis] != n[axis] || b[axis] != n[axis]) continue;
            a[axis] = 0;
            b[axis] = 0;
            const int la = mesh.vertex_id(a[0], a[1], a[2]);
            const int lb = mesh.vertex_id(b[0], b[1], b[2]);
            const int leader = mesh.edge_id(la, lb);
            // canonical direction of the leader copy vs the follower copy
            const int sign = ((la < lb) == (mesh.edges[e][0] < mesh.edges[e][1])) ? +1 : -1;
            fp.edge_pairs[axis].push_back({e, leader, sign});
        }
    }
    return fp;
}

void write_vtk_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_vtk_mesh: cannot open " + path);
    os << "# vtk DataFile Version 3.0\n";
    os << "mmrve RVE mesh\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& v : mesh.vertices)
        os << v[0] << " " << v[1] << " " << v[2] << "\n";
    os << "CELLS " << mesh.n_cells() << " " << 9 * mesh.n_cells() << "\n";
    for (const auto& c : mesh.cells) {
        os << "8";
        for (int v : c) os << " " << v;
        os << "\n";
    }
    os << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) os << "12\n";
    os << "CELL_DATA " << mesh.n_cells() << "\n";
    os << "SCALARS phase int 1\nLOOKUP_TABLE default\n";
    for (Phase p : mesh.phase) os << (p == Phase::Particle ? 1 : 0) << "\n";
}

} // namespace mmrve
