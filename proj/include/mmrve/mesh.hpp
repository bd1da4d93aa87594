#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "mmrve/error.hpp"
#include "mmrve/material.hpp"

namespace mmrve {

using Vec3 = Eigen::Vector3d;

struct Inclusion {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
};

// Periodic structured hexahedral RVE grid. Vertices are numbered
// lexicographically (x fastest), cells likewise; edges are stored with
// canonical direction low vertex id -> high vertex id.
struct Mesh {
    std::array<int, 3> n{};  // cells per axis
    Vec3 L = Vec3::Ones();   // domain edge lengths

    std::vector<Vec3> vertices;
    std::vector<std::array<int, 8>> cells;            // VTK hexahedron ordering
    std::vector<std::array<int, 2>> edges;            // canonical lo -> hi
    std::vector<std::array<int, 12>> cell_edges;      // global edge ids per cell
    std::vector<std::array<int, 12>> cell_edge_signs; // +1 if canonical dir == local +axis
    std::vector<Phase> phase;                         // per cell

    double voxel_volume_fraction = 0.0;
    double analytic_volume_fraction = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    int vertex_id(int i, int j, int k) const {
        return i + (n[0] + 1) * (j + (n[1] + 1) * k);
    }
    std::array<int, 3> vertex_index(int vid) const {
        const int sx = n[0] + 1, sy = n[1] + 1;
        return {vid % sx, (vid / sx) % sy, vid / (sx * sy)};
    }
    int cell_id(int i, int j, int k) const { return i + n[0] * (j + n[1] * k); }

    // Edge id from its endpoint vertex ids; -1 if not an edge of the grid.
    int edge_id(int v1, int v2) const;

    Vec3 cell_size() const { return {L[0] / n[0], L[1] / n[1], L[2] / n[2]}; }
    double cell_volume() const { auto h = cell_size(); return h[0] * h[1] * h[2]; }
};

// Reference-cell topology shared between the mesh and the element routines.
// Local vertex v: coordinates kHexVertexRef[v] in [-1,1]^3, VTK ordering.
extern const std::array<std::array<double, 3>, 8> kHexVertexRef;
// Local edge e: endpoints in local vertex numbering, directed along +axis.
extern const std::array<std::array<int, 2>, 12> kHexEdgeVertices;
// Axis (0,1,2) each local edge runs along.
extern const std::array<int, 12> kHexEdgeAxis;

// Voxel phase assignment: a cell is Particle iff its centroid lies inside any
// inclusion under minimum-image (periodic) distance. Throws GeometryError on
// overlapping inclusions.
Mesh build_rve_mesh(const std::array<int, 3>& n, const Vec3& L,
                    const std::vector<Inclusion>& inclusions);

// Periodic pairing of boundary entities, one list per axis. Followers live on
// the + face, leaders on the opposing - face separated by exactly L_i.
struct FacePairing {
    struct VertexPair { int follower; int leader; };
    struct EdgePair { int follower; int leader; int sign; };

    std::array<std::vector<VertexPair>, 3> vertex_pairs;
    std::array<std::vector<EdgePair>, 3> edge_pairs;
};

FacePairing pair_periodic_entities(const Mesh& mesh);

// Legacy ASCII VTK export of the grid with the per-cell phase field. Optional
// extra point/cell data are appended by the runner.
void write_vtk_mesh(const Mesh& mesh, const std::string& path);

} // namespace mmrve
