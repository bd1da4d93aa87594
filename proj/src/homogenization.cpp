#include "mmrve/homogenization.hpp"

namespace mmrve {

HomogenizedRecord average_all(const Assembler& assembler, const Eigen::VectorXd& x,
                              const Vec3& B_M) {
    HomogenizedRecord rec;
    Mat3 F_sum = Mat3::Zero(), P_sum = Mat3::Zero(), sig_sum = Mat3::Zero();
    Vec3 B_sum = Vec3::Zero(), H_sum = Vec3::Zero();
    double J_sum = 0.0, psi_sum = 0.0, vol = 0.0;

    assembler.for_each_point(
        x, B_M,
        [&](int /*cell*/, double w, const PointKinematics& pk, const PointStress& s,
            double scell_over_ve) {
            const double J = pk.F.determinant();
            const Mat3 cof = J * pk.F.inverse().transpose();
            const Mat3 P_eff = s.P + scell_over_ve * cof;
            F_sum += w * pk.F;
            B_sum += w * pk.B;
            P_sum += w * P_eff;
            H_sum += w * s.H;
            sig_sum += w * (P_eff * pk.F.transpose()) / J;
            J_sum += w * J;
            psi_sum += w * s.psi;
            vol += w;
        });

    rec.F_avg = F_sum / vol;
    rec.B_avg = B_sum / vol;
    rec.P_avg = P_sum / vol;
    rec.H_avg = H_sum / vol;
    rec.sigma_avg = sig_sum / vol;
    rec.J_avg = J_sum / vol;
    rec.psi_avg = psi_sum / vol;
    return rec;
}

double phase_average_jacobian(const Assembler& assembler, const Eigen::VectorXd& x, Phase phase) {
    double jsum = 0.0, vol = 0.0;
    const auto& mesh = assembler.mesh();
    assembler.for_each_point(
        x, Vec3::Zero(),
        [&](int cell, double w, const PointKinematics& pk, const PointStress&, double) {
            if (mesh.phase[cell] != phase) return;
            jsum += w * pk.F.determinant();
            vol += w;
        });
    if (vol == 0.0) return 1.0;
    return jsum / vol;
}

double hill_mandel_gap(const Assembler& assembler, const Reduction& red,
                       const ConstraintSet& constraints, const Eigen::VectorXd& x,
                       const Vec3& B_M, const Mat3& dF_M, const Vec3& dB_M,
                       LinearBackend backend) {
    const int n = assembler.dofs().n_total();

    // sensitivity solve: K_red y_dot = -T^T (K s_dot + dR/dB_M . dB)
    Assembler::Request req;
    req.tangent = true;
    req.load_dir = &dB_M;
    const auto sys = assembler.assemble(x, B_M, req);
    const Eigen::VectorXd s_dot = constraints.offset_direction(n, dF_M);
    const Eigen::VectorXd rhs_full = sys.K * s_dot + sys.load;
    const Eigen::SparseMatrix<double> Kr = condense_matrix(sys.K, red);
    const Eigen::VectorXd y_dot =
        linear_solve(Kr, Eigen::VectorXd(-condense_residual(rhs_full, red)), backend);
    const Eigen::VectorXd x_dot = red.T * y_dot + s_dot;

    // micro power <P:F_dot + H:B_dot> with the effective (jbar-consistent) P
    const auto& dofs = assembler.dofs();
    const auto& basis = assembler.basis();
    const auto& mesh = assembler.mesh();
    double micro = 0.0, vol = 0.0;
    int qp_in_cell = 0;
    const int nq = static_cast<int>(basis.pts.size());
    std::array<int, 24> udofs;
    std::array<int, 12> adofs;
    std::array<double, 12> signs;

    assembler.for_each_point(
        x, B_M,
        [&](int cell, double w, const PointKinematics& pk, const PointStress& s,
            double scell_over_ve) {
            const int q = qp_in_cell;
            qp_in_cell = (qp_in_cell + 1) % nq;
            assembler.cell_dofs(cell, udofs, adofs, signs);
            const auto& pt = basis.pts[q];

            Mat3 F_dot = Mat3::Zero();
            for (int a = 0; a < 8; ++a)
                for (int i = 0; i < 3; ++i)
                    F_dot.row(i) += x_dot[udofs[3 * a + i]] * pt.grad_N[a].transpose();
            Vec3 B_dot = dB_M;
            for (int e = 0; e < 12; ++e) B_dot += signs[e] * x_dot[adofs[e]] * pt.curl[e];

            const double J = pk.F.determinant();
            const Mat3 cof = J * pk.F.inverse().transpose();
            const Mat3 P_eff = s.P + scell_over_ve * cof;
            micro += w * (P_eff.cwiseProduct(F_dot).sum() + s.H.dot(B_dot));
            vol += w;
        });
    micro /= vol;

    const HomogenizedRecord rec = average_all(assembler, x, B_M);
    const double macro = rec.P_avg.cwiseProduct(dF_M).sum() + rec.H_avg.dot(dB_M);

    const double scale = std::max({std::abs(micro), std::abs(macro), 1e-300});
    return std::abs(macro - micro) / scale;
}

Vec3 effective_magnetostriction(const Mat3& F_avg) {
    return {F_avg(0, 0) - 1.0, F_avg(1, 1) - 1.0, F_avg(2, 2) - 1.0};
}

double directional_magnetostriction(const Mat3& F_avg, const Vec3& N) {
    const Mat3 C = F_avg.transpose() * F_avg;
    return std::sqrt(N.dot(C * N)) - 1.0;
}

} // namespace mmrve
