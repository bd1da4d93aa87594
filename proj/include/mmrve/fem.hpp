#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mmrve/mesh.hpp"

namespace mmrve {

using Mat3 = Eigen::Matrix3d;

struct QuadratureRule {
    std::vector<Vec3> points;     // reference coordinates in [-1,1]^3
    std::vector<double> weights;  // sum to 8
};

// Tensor-product Gauss rule with npts points per axis.
QuadratureRule gauss_rule(int npts);
// Default rule for all terms: 2x2x2.
const QuadratureRule& default_rule();

// Trilinear Lagrange shape functions on [-1,1]^3, VTK vertex ordering.
void lagrange_eval(const Vec3& xi, std::array<double, 8>& values,
                   std::array<Vec3, 8>& gradients);

// Lowest-order Nedelec edge functions of the first family on [-1,1]^3.
// Function e has unit tangential circulation on reference edge e (directed
// along the +axis, see kHexEdgeVertices) and zero on the others. Curls are
// analytic.
void nedelec_eval(const Vec3& xi, std::array<Vec3, 12>& vectors,
                  std::array<Vec3, 12>& curls);

// Global DOF numbering: 3 displacement DOFs per vertex, then one circulation
// DOF per edge.
struct DofMap {
    int n_vertices = 0;
    int n_edges = 0;

    explicit DofMap(const Mesh& mesh)
        : n_vertices(mesh.n_vertices()), n_edges(mesh.n_edges()) {}

    int n_u() const { return 3 * n_vertices; }
    int n_a() const { return n_edges; }
    int n_total() const { return n_u() + n_a(); }

    int u_dof(int vertex, int comp) const { return 3 * vertex + comp; }
    int a_dof(int edge) const { return n_u() + edge; }
};

// Geometry of one (box) cell plus basis data mapped to physical coordinates,
// evaluated at each quadrature point. The structured grid has congruent
// cells, so one instance is shared by all of them.
struct CellBasis {
    struct Point {
        double wdet = 0.0;                   // quadrature weight x |det J_map|
        std::array<Vec3, 8> grad_N;          // physical Lagrange gradients
        std::array<Vec3, 12> ned;            // covariant-mapped edge functions
        std::array<Vec3, 12> curl;           // Piola-mapped curls
    };
    std::vector<Point> pts;
    double volume = 0.0;

    CellBasis(const Mesh& mesh, const QuadratureRule& rule);
};

// F = I + grad(u) and B = B_M + curl(A) at one reference point of a cell,
// assembled from the global state vector x = [u; a].
struct PointFields {
    Mat3 F;
    Vec3 B;
};
PointFields evaluate_point_state(const Mesh& mesh, const DofMap& dofs,
                                 const Eigen::VectorXd& x, const Vec3& B_M,
                                 int cell, const Vec3& xi);

// Volume-averaged det(F) over one cell; throws MeshError (with cell id) if an
// integration point has det(F) <= 0.
double cell_average_jacobian(const Mesh& mesh, const DofMap& dofs,
                             const Eigen::VectorXd& x, int cell,
                             const QuadratureRule& rule);

// Circulation DOFs of an analytic field A(X): a_e = int_e A . t ds along the
// canonical edge direction (2-point Gauss per edge). Test and setup helper.
template <class Field>
Eigen::VectorXd interpolate_edge_field(const Mesh& mesh, Field&& A) {
    Eigen::VectorXd a(mesh.n_edges());
    const double g = 1.0 / std::sqrt(3.0);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const Vec3 p0 = mesh.vertices[mesh.edges[e][0]];
        const Vec3 p1 = mesh.vertices[mesh.edges[e][1]];
        const Vec3 mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
        a[e] = half.dot(A(mid - g * half) + A(mid + g * half));
    }
    return a;
}

} // namespace mmrve
