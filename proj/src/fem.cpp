#include "mmrve/fem.hpp"

#include <cmath>
#include <sstream>

namespace mmrve {

QuadratureRule gauss_rule(int npts) {
    // Golub-Welsch is overkill for the handful of orders used here.
    std::vector<double> x, w;
    switch (npts) {
        case 1: x = {0.0}; w = {2.0}; break;
        case 2: {
            const double g = 1.0 / std::sqrt(3.0);
            x = {-g, g};
            w = {1.0, 1.0};
            break;
        }
        case 3: {
            const double g = std::sqrt(3.0 / 5.0);
            x = {-g, 0.0, g};
            w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        }
        case 4: {
            const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
            const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
            x = {-b, -a, a, b};
            w = {wb, wa, wa, wb};
            break;
        }
        case 5: {
            const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            x = {-b, -a, 0.0, a, b};
            w = {wb, wa, 128.0 / 225.0, wa, wb};
            break;
        }
        default:
            throw std::invalid_argument("gauss_rule: unsupported order");
    }
    QuadratureRule rule;
    for (int k = 0; k < npts; ++k)
        for (int j = 0; j < npts; ++j)
            for (int i = 0; i < npts; ++i) {
                rule.points.emplace_back(x[i], x[j], x[k]);
                rule.weights.push_back(w[i] * w[j] * w[k]);
            }
    return rule;
}

const QuadratureRule& default_rule() {
    static const QuadratureRule rule = gauss_rule(2);
    return rule;
}

void lagrange_eval(const Vec3& xi, std::array<double, 8>& values,
                   std::array<Vec3, 8>& gradients) {
    for (int a = 0; a < 8; ++a) {
        const double sx = kHexVertexRef[a][0], sy = kHexVertexRef[a][1], sz = kHexVertexRef[a][2];
        const double fx = 1.0 + sx * xi[0], fy = 1.0 + sy * xi[1], fz = 1.0 + sz * xi[2];
        values[a] = 0.125 * fx * fy * fz;
        gradients[a] = 0.125 * Vec3(sx * fy * fz, fx * sy * fz, fx * fy * sz);
    }
}

void nedelec_eval(const Vec3& xi, std::array<Vec3, 12>& vectors,
                  std::array<Vec3, 12>& curls) {
    for (int e = 0; e < 12; ++e) {
        const int d = kHexEdgeAxis[e];
        const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
        // transverse signs of the edge, taken from its first endpoint
        const auto& v0 = kHexVertexRef[kHexEdgeVertices[e][0]];
        const double s1 = v0[t1], s2 = v0[t2];
        const double f1 = 1.0 + s1 * xi[t1], f2 = 1.0 + s2 * xi[t2];

        Vec3 vec = Vec3::Zero();
        vec[d] = 0.125 * f1 * f2;
        vectors[e] = vec;

        // curl of f(x_t1, x_t2) e_d
        Vec3 curl = Vec3::Zero();
        curl[t1] = 0.125 * f1 * s2;   // d(vec_d)/d(x_t2)
        curl[t2] = -0.125 * s1 * f2;  // -d(vec_d)/d(x_t1)
        curls[e] = curl;
    }
}

CellBasis::CellBasis(const Mesh& mesh, const QuadratureRule& rule) {
    // Affine diagonal map for the structured box grid.
    const Vec3 h = mesh.cell_size();
    const Mat3 Jmap = (0.5 * h).asDiagonal();
    const double det = Jmap.determinant();
    const Mat3 JinvT = Jmap.inverse().transpose();

    volume = mesh.cell_volume();
    pts.resize(rule.points.size());
    for (size_t q = 0; q < rule.points.size(); ++q) {
        Point& pt = pts[q];
        pt.wdet = rule.weights[q] * det;

        std::array<double, 8> vals;
        std::array<Vec3, 8> grads;
        lagrange_eval(rule.points[q], vals, grads);
        for (int a = 0; a < 8; ++a) pt.grad_N[a] = JinvT * grads[a];

        std::array<Vec3, 12> vecs, curls;
        nedelec_eval(rule.points[q], vecs, curls);
        for (int e = 0; e < 12; ++e) {
            pt.ned[e] = JinvT * vecs[e];             // covariant map
            pt.curl[e] = (Jmap * curls[e]) / det;    // Piola map of the curl
        }
    }
}

PointFields evaluate_point_state(const Mesh& mesh, const DofMap& dofs,
                                 const Eigen::VectorXd& x, const Vec3& B_M,
                                 int cell, const Vec3& xi) {
    const Vec3 h = mesh.cell_size();
    const Mat3 Jmap = (0.5 * h).asDiagonal();
    const double det = Jmap.determinant();
    if (det <= 0.0) throw MeshError("evaluate_point_state: degenerate cell", cell);
    const Mat3 JinvT = Jmap.inverse().transpose();

    std::array<double, 8> vals;
    std::array<Vec3, 8> grads;
    lagrange_eval(xi, vals, grads);
    std::array<Vec3, 12> vecs, curls;
    nedelec_eval(xi, vecs, curls);

    PointFields out;
    out.F = Mat3::Identity();
    for (int a = 0; a < 8; ++a) {
        const int v = mesh.cells[cell][a];
        const Vec3 grad = JinvT * grads[a];
        for (int i = 0; i < 3; ++i) out.F.row(i) += x[dofs.u_dof(v, i)] * grad.transpose();
    }
    out.B = B_M;
    for (int e = 0; e < 12; ++e) {
        const int ge = mesh.cell_edges[cell][e];
        const double coeff = mesh.cell_edge_signs[cell][e] * x[dofs.a_dof(ge)];
        out.B += coeff * (Jmap * curls[e]) / det;
    }
    return out;
}

double cell_average_jacobian(const Mesh& mesh, const DofMap& dofs,
                             const Eigen::VectorXd& x, int cell,
                             const QuadratureRule& rule) {
    double vol = 0.0, jint = 0.0;
    const Vec3 h = mesh.cell_size();
    const double det = h[0] * h[1] * h[2] / 8.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const PointFields f = evaluate_point_state(mesh, dofs, x, Vec3::Zero(), cell, rule.points[q]);
        const double J = f.F.determinant();
        if (J <= 0.0) {
            std::ostringstream os;
            os << "cell_average_jacobian: det(F) <= 0 in cell " << cell;
            throw MeshError(os.str(), cell);
        }
        vol += rule.weights[q] * det;
        jint += rule.weights[q] * det * J;
    }
    return jint / vol;
}

} // namespace mmrve
