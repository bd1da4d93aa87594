#pragma once

#include "mmrve/assembly.hpp"
#include "mmrve/solver.hpp"

namespace mmrve {

// Volume-averaged macroscopic quantities at one pseudo-time. Cauchy stress is
// averaged pointwise as J^-1 P F^T over the reference volume.
struct HomogenizedRecord {
    double t = 0.0;
    Mat3 F_avg = Mat3::Identity();
    Vec3 B_avg = Vec3::Zero();
    Mat3 P_avg = Mat3::Zero();
    Vec3 H_avg = Vec3::Zero();
    Mat3 sigma_avg = Mat3::Zero();
    double J_avg = 1.0;
    double psi_avg = 0.0;
    int newton_iters = 0;
};

HomogenizedRecord average_all(const Assembler& assembler, const Eigen::VectorXd& x,
                              const Vec3& B_M);

// <det F> restricted to cells of one phase (volume-weighted); used by the
// inclusion-compressibility studies.
double phase_average_jacobian(const Assembler& assembler, const Eigen::VectorXd& x, Phase phase);

// Normalized Hill-Mandel gap |Pbar:dF + Hbar:dB - <P:F_dot + H:B_dot>| for one
// macroscopic rate direction, with the micro rates obtained from a linearized
// sensitivity solve at the converged state.
double hill_mandel_gap(const Assembler& assembler, const Reduction& red,
                       const ConstraintSet& constraints, const Eigen::VectorXd& x,
                       const Vec3& B_M, const Mat3& dF_M, const Vec3& dB_M,
                       LinearBackend backend = LinearBackend::Direct);

// lambda_ii = F_ii - 1 for the three axes.
Vec3 effective_magnetostriction(const Mat3& F_avg);
// lambda(N) = sqrt(N . C N) - 1 for a unit direction N.
double directional_magnetostriction(const Mat3& F_avg, const Vec3& N);

} // namespace mmrve
