#pragma once

#include <Eigen/Dense>

#include "mmrve/constitutive.hpp"

namespace mmrve {

// Dual types over the 12 point variables (F row-major, then B)...
using DualScalar2 = Dual2<12>;
// ...and over the 13 assembly variables (F, B, jbar). The element-averaged
// Jacobian couples quadrature points of one cell, so its sensitivities are
// carried alongside and wired in during assembly rather than here.
using DualAsm2 = Dual2<13>;
using DualAsm1 = Dual1<13>;

// Flattening convention for F-indexed blocks: row-major, idx(i,j) = 3*i + j.
inline int flat(int i, int j) { return 3 * i + j; }

// First derivatives of psi at a point, including the jbar sensitivity.
struct PointStress {
    double psi = 0.0;
    Mat3 P = Mat3::Zero();   // dpsi/dF at fixed jbar
    Vec3 H = Vec3::Zero();   // dpsi/dB
    double S1 = 0.0;         // dpsi/djbar
};

// Full second-order point derivatives.
struct PointDerivatives {
    double psi = 0.0;
    Mat3 P = Mat3::Zero();
    Vec3 H = Vec3::Zero();
    Eigen::Matrix<double, 9, 9> A;  // dP/dF
    Eigen::Matrix<double, 9, 3> C;  // dP/dB
    Eigen::Matrix<double, 3, 9> D;  // dH/dF (= C^T blockwise)
    Eigen::Matrix<double, 3, 3> E;  // dH/dB
    double S1 = 0.0;                // dpsi/djbar
    Eigen::Matrix<double, 9, 1> MF; // d2psi/dF djbar
    Vec3 MB = Vec3::Zero();         // d2psi/dB djbar
    double S2 = 0.0;                // d2psi/djbar2
};

// Derivatives with jbar held fixed (the point-level contract: P, H and the
// four tangent blocks of the coupled problem).
PointDerivatives energy_derivatives(const PointKinematics& pk, const MaterialParams& p);

// Same evaluation but also differentiated in jbar; used by the assembler.
PointDerivatives energy_derivatives_jbar(const PointKinematics& pk, const MaterialParams& p);

// First-order only (cheap path for residuals and averaging).
PointStress energy_stress(const PointKinematics& pk, const MaterialParams& p);

// Total first Piola-Kirchhoff stress including the jbar channel,
// P_total = P + S1 * cof(F). On uniform states this is the pointwise
// constitutive stress the homogenized averages reduce to.
Mat3 total_pk1(const PointKinematics& pk, const MaterialParams& p);

} // namespace mmrve
