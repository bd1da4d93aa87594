#include "mmrve/assembly.hpp"

#include <sstream>

namespace mmrve {

namespace {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

Vec9 flatten(const Mat3& M) {
    Vec9 v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[flat(i, j)] = M(i, j);
    return v;
}

// d2(det F)/dF2 in the row-major flattening.
Mat9 det_hessian(const Mat3& F) {
    const double J = F.determinant();
    const Mat3 Fi = F.inverse();
    Mat9 H;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    H(flat(i, j), flat(k, l)) = J * (Fi(j, i) * Fi(l, k) - Fi(j, k) * Fi(l, i));
    return H;
}

} // namespace

Assembler::Assembler(const Mesh& mesh, const DofMap& dofs, const TwoPhaseMaterial& materials,
                     const QuadratureRule& rule)
    : mesh_(mesh), dofs_(dofs), materials_(materials), basis_(mesh, rule) {}

void Assembler::cell_dofs(int cell, std::array<int, 24>& udofs, std::array<int, 12>& adofs,
                          std::array<double, 12>& signs) const {
    for (int a = 0; a < 8; ++a)
        for (int k = 0; k < 3; ++k) udofs[3 * a + k] = dofs_.u_dof(mesh_.cells[cell][a], k);
    for (int e = 0; e < 12; ++e) {
        adofs[e] = dofs_.a_dof(mesh_.cell_edges[cell][e]);
        signs[e] = double(mesh_.cell_edge_signs[cell][e]);
    }
}

double Assembler::cell_jbar(const Eigen::VectorXd& x, int cell) const {
    std::array<int, 24> udofs;
    std::array<int, 12> adofs;
    std::array<double, 12> signs;
    cell_dofs(cell, udofs, adofs, signs);

    double jint = 0.0;
    for (const auto& pt : basis_.pts) {
        Mat3 F = Mat3::Identity();
        for (int a = 0; a < 8; ++a)
            for (int i = 0; i < 3; ++i) F.row(i) += x[udofs[3 * a + i]] * pt.grad_N[a].transpose();
        const double J = F.determinant();
        if (J <= 0.0) {
            std::ostringstream os;
            os << "assemble: element inversion in cell " << cell;
            throw MeshError(os.str(), cell);
        }
        jint += pt.wdet * J;
    }
    return jint / basis_.volume;
}

Assembler::Result Assembler::assemble(const Eigen::VectorXd& x, const Vec3& B_M,
                                      const Request& req) const {
    const int nq = static_cast<int>(basis_.pts.size());
    const int n = dofs_.n_total();

    Result out;
    out.energy = 0.0;
    out.R = Eigen::VectorXd::Zero(n);
    if (req.load_dir) out.load = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Triplet<double>> trips;
    if (req.tangent) trips.reserve(static_cast<size_t>(mesh_.n_cells()) * 36 * 36);

    std::array<int, 24> udofs;
    std::array<int, 12> adofs;
    std::array<double, 12> signs;

    std::vector<Mat3> Fq(nq);
    std::vector<Vec3> Bq(nq);

    for (int cell = 0; cell < mesh_.n_cells(); ++cell) {
        cell_dofs(cell, udofs, adofs, signs);
        const MaterialParams& mat = materials_.of(mesh_.phase[cell]);

        // pass 1: kinematics and element-averaged Jacobian
        double jint = 0.0;
        for (int q = 0; q < nq; ++q) {
            const auto& pt = basis_.pts[q];
            Mat3 F = Mat3::Identity();
            for (int a = 0; a < 8; ++a)
                for (int i = 0; i < 3; ++i)
                    F.row(i) += x[udofs[3 * a + i]] * pt.grad_N[a].transpose();
            const double J = F.determinant();
            if (J <= 0.0) {
                std::ostringstream os;
                os << "assemble: element inversion in cell " << cell;
                throw MeshError(os.str(), cell);
            }
            jint += pt.wdet * J;
            Fq[q] = F;
            Vec3 B = B_M;
            for (int e = 0; e < 12; ++e) B += signs[e] * x[adofs[e]] * pt.curl[e];
            Bq[q] = B;
        }
        const double jbar = jint / basis_.volume;

        Eigen::Matrix<double, 24, 1> Rl_u = Eigen::Matrix<double, 24, 1>::Zero();
        Eigen::Matrix<double, 12, 1> Rl_a = Eigen::Matrix<double, 12, 1>::Zero();
        Eigen::Matrix<double, 24, 1> g = Eigen::Matrix<double, 24, 1>::Zero();
        double S = 0.0;

        Eigen::Matrix<double, 24, 24> Kuu;
        Eigen::Matrix<double, 24, 12> Kua;
        Eigen::Matrix<double, 12, 12> Kaa;
        Eigen::Matrix<double, 24, 24> Hgeo;
        Eigen::Matrix<double, 24, 1> sF;
        Eigen::Matrix<double, 12, 1> sB;
        double S2s = 0.0;
        if (req.tangent) {
            Kuu.setZero();
            Kua.setZero();
            Kaa.setZero();
            Hgeo.setZero();
            sF.setZero();
            sB.setZero();
        }
        Eigen::Matrix<double, 24, 1> loadu = Eigen::Matrix<double, 24, 1>::Zero();
        Eigen::Matrix<double, 12, 1> loada = Eigen::Matrix<double, 12, 1>::Zero();
        double loadS = 0.0;

        for (int q = 0; q < nq; ++q) {
            const auto& pt = basis_.pts[q];
            const double w = pt.wdet;
            PointKinematics pk{Fq[q], Bq[q], jbar};

            // strain-displacement operators of this point
            Eigen::Matrix<double, 9, 24> Bu = Eigen::Matrix<double, 9, 24>::Zero();
            for (int a = 0; a < 8; ++a)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) Bu(flat(i, j), 3 * a + i) = pt.grad_N[a][j];
            Eigen::Matrix<double, 3, 12> Ba;
            for (int e = 0; e < 12; ++e) Ba.col(e) = signs[e] * pt.curl[e];

            const Mat3 cof = Fq[q].determinant() * Fq[q].inverse().transpose();
            const Vec9 cof_flat = flatten(cof);
            g.noalias() += (w / basis_.volume) * (Bu.transpose() * cof_flat);

            if (req.tangent || req.load_dir) {
                const PointDerivatives d = energy_derivatives_jbar(pk, mat);
                out.energy += w * d.psi;
                Rl_u.noalias() += w * (Bu.transpose() * flatten(d.P));
                Rl_a.noalias() += w * (Ba.transpose() * d.H);
                S += w * d.S1;
                if (req.tangent) {
                    Kuu.noalias() += w * (Bu.transpose() * d.A * Bu);
                    Kua.noalias() += w * (Bu.transpose() * d.C * Ba);
                    Kaa.noalias() += w * (Ba.transpose() * d.E * Ba);
                    Hgeo.noalias() += (w / basis_.volume) * (Bu.transpose() * det_hessian(Fq[q]) * Bu);
                    sF.noalias() += w * (Bu.transpose() * d.MF);
                    sB.noalias() += w * (Ba.transpose() * d.MB);
                    S2s += w * d.S2;
                }
                if (req.load_dir) {
                    const Vec3 dB = *req.load_dir;
                    loadu.noalias() += w * (Bu.transpose() * (d.C * dB));
                    loada.noalias() += w * (Ba.transpose() * (d.E * dB));
                    loadS += w * d.MB.dot(dB);
                }
            } else {
                const PointStress s = energy_stress(pk, mat);
                out.energy += w * s.psi;
                Rl_u.noalias() += w * (Bu.transpose() * flatten(s.P));
                Rl_a.noalias() += w * (Ba.transpose() * s.H);
                S += w * s.S1;
            }
        }

        Rl_u.noalias() += S * g;

        for (int i = 0; i < 24; ++i) out.R[udofs[i]] += Rl_u[i];
        for (int e = 0; e < 12; ++e) out.R[adofs[e]] += Rl_a[e];

        if (req.load_dir) {
            loadu.noalias() += loadS * g;
            for (int i = 0; i < 24; ++i) out.load[udofs[i]] += loadu[i];
            for (int e = 0; e < 12; ++e) out.load[adofs[e]] += loada[e];
        }

        if (req.tangent) {
            Kuu.noalias() += sF * g.transpose();
            Kuu.noalias() += g * sF.transpose();
            Kuu.noalias() += S2s * (g * g.transpose());
            Kuu.noalias() += S * Hgeo;
            Kua.noalias() += g * sB.transpose();

            for (int i = 0; i < 24; ++i)
                for (int j = 0; j < 24; ++j) trips.emplace_back(udofs[i], udofs[j], Kuu(i, j));
            for (int i = 0; i < 24; ++i)
                for (int e = 0; e < 12; ++e) {
                    trips.emplace_back(udofs[i], adofs[e], Kua(i, e));
                    trips.emplace_back(adofs[e], udofs[i], Kua(i, e));
                }
            for (int e = 0; e < 12; ++e)
                for (int f = 0; f < 12; ++f) trips.emplace_back(adofs[e], adofs[f], Kaa(e, f));
        }
    }

    if (req.tangent) {
        out.K.resize(n, n);
        out.K.setFromTriplets(trips.begin(), trips.end());
    }
    return out;
}

void Assembler::for_each_point(const Eigen::VectorXd& x, const Vec3& B_M,
                               const PointVisitor& visit) const {
    const int nq = static_cast<int>(basis_.pts.size());
    std::array<int, 24> udofs;
    std::array<int, 12> adofs;
    std::array<double, 12> signs;
    std::vector<PointKinematics> pks(nq);
    std::vector<PointStress> stresses(nq);

    for (int cell = 0; cell < mesh_.n_cells(); ++cell) {
        cell_dofs(cell, udofs, adofs, signs);
        const MaterialParams& mat = materials_.of(mesh_.phase[cell]);

        double jint = 0.0;
        for (int q = 0; q < nq; ++q) {
            const auto& pt = basis_.pts[q];
            Mat3 F = Mat3::Identity();
            for (int a = 0; a < 8; ++a)
                for (int i = 0; i < 3; ++i)
                    F.row(i) += x[udofs[3 * a + i]] * pt.grad_N[a].transpose();
            const double J = F.determinant();
            if (J <= 0.0) {
                std::ostringstream os;
                os << "for_each_point: element inversion in cell " << cell;
                throw MeshError(os.str(), cell);
            }
            jint += pt.wdet * J;
            pks[q].F = F;
            Vec3 B = B_M;
            for (int e = 0; e < 12; ++e) B += signs[e] * x[adofs[e]] * pt.curl[e];
            pks[q].B = B;
        }
        const double jbar = jint / basis_.volume;

        double S = 0.0;
        for (int q = 0; q < nq; ++q) {
            pks[q].jbar = jbar;
            stresses[q] = energy_stress(pks[q], mat);
            S += basis_.pts[q].wdet * stresses[q].S1;
        }
        const double scell_over_ve = S / basis_.volume;
        for (int q = 0; q < nq; ++q)
            visit(cell, basis_.pts[q].wdet, pks[q], stresses[q], scell_over_ve);
    }
}

} // namespace mmrve
