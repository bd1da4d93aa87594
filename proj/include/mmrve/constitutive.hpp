#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "mmrve/dual.hpp"
#include "mmrve/error.hpp"
#include "mmrve/material.hpp"

namespace mmrve {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

// State at a single quadrature point: deformation gradient, referential
// induction, and the element-averaged Jacobian of the host cell.
struct PointKinematics {
    Mat3 F = Mat3::Identity();
    Vec3 B = Vec3::Zero();
    double jbar = 1.0;
};

// ---------------------------------------------------------------------------
// Langevin saturation model
// ---------------------------------------------------------------------------

// L(x) = coth(x) - 1/x, with a series branch near zero to avoid cancellation.
double langevin(double x);
// L'(x) = 1/x^2 - 1/sinh(x)^2.
double langevin_prime(double x);
// ln(sinh(x)/x), stable for small and large arguments.
double log_sinhc(double x);

// Inverts mu0*(h + ms*L(alpha*h)) = b for h >= 0 by safeguarded Newton with
// bisection fallback (rtol 1e-12, atol 1e-14 T, <= 100 iterations).
double solve_langevin_field(double b, const MaterialParams& p);

// dh/db at the converged field, from the implicit function theorem.
double langevin_field_slope(double h, const MaterialParams& p);

// Magnetization energy density per current volume, w(b) = b*h - mu0/2 h^2 - W*(h).
double magnetization_energy(double b, const MaterialParams& p);

// w and its first two derivatives with respect to q = b^2. This is the form
// consumed by the dual-number energy evaluation: q is smooth in (F, B) while
// b itself is not differentiable at B = 0.
struct MagEnergyQ {
    double w = 0.0;
    double dw_dq = 0.0;
    double d2w_dq2 = 0.0;
};
MagEnergyQ magnetization_energy_q(double q, const MaterialParams& p);

// ---------------------------------------------------------------------------
// J-bar split
// ---------------------------------------------------------------------------

struct JbarSplit {
    Mat3 Fbar;
    double I1bar;
};

// Fbar = (jbar/det F)^(1/3) F, I1bar = tr(Fbar^T Fbar).
JbarSplit jbar_split(const Mat3& F, double jbar);

// ---------------------------------------------------------------------------
// Free energy density
// ---------------------------------------------------------------------------

// Helper giving 1/x for each supported scalar type.
inline double inv_or_div(double x) { return 1.0 / x; }
template <int N>
inline Dual1<N> inv_or_div(const Dual1<N>& x) { return inv(x); }
template <int N>
inline Dual2<N> inv_or_div(const Dual2<N>& x) { return inv(x); }

// Total referential free energy. Generic over the scalar type so the same
// expression yields values (double), first derivatives (Dual1) and second
// derivatives (Dual2).
//
// Variable layout for dual evaluation: F row-major in slots 0..8, B in 9..11,
// jbar in slot 12 when carried as a variable.
template <class S>
S energy_density(const std::array<S, 9>& F, const std::array<S, 3>& B, const S& jbar,
                 const MaterialParams& p) {
    // det F by cofactor expansion
    const S c00 = F[4] * F[8] - F[5] * F[7];
    const S c01 = F[5] * F[6] - F[3] * F[8];
    const S c02 = F[3] * F[7] - F[4] * F[6];
    const S J = F[0] * c00 + F[1] * c01 + F[2] * c02;
    if (value_of(J) <= 0.0)
        throw InvalidKinematicsError("energy_density: det(F) <= 0");

    S I1 = F[0] * F[0];
    for (int i = 1; i < 9; ++i) I1 += F[i] * F[i];

    // Isochoric first invariant J^(-2/3) I1. The volumetric response of the
    // Yeoh phases is carried exclusively by jbar, so the reference state is
    // stress-free for any phase contrast.
    const S i1_iso = I1 * pow(J, -2.0 / 3.0);

    S psi;
    if (p.model == MechModel::Yeoh) {
        const S em = i1_iso - 3.0;
        const S jm = jbar - 1.0;
        psi = 0.5 * p.K * (jm * jm) + p.C1 * em + p.C2 * (em * em) + p.C3 * (em * em * em);
    } else {
        // Compressible Neo-Hookean phase: pointwise J throughout, fully
        // decoupled from the cell-averaged dilatation.
        const S lj = log(J);
        psi = 0.5 * p.mu_nh * (i1_iso - 3.0) + 0.5 * p.kappa_nh * (lj * lj);
    }

    // q = |F B|^2
    S q = S(0.0);
    for (int i = 0; i < 3; ++i) {
        const S fb = F[3 * i + 0] * B[0] + F[3 * i + 1] * B[1] + F[3 * i + 2] * B[2];
        q += fb * fb;
    }

    // Vacuum term |F B|^2 / (2 mu0 J); magnetic terms always use pointwise J.
    const S Jinv = inv_or_div(J);
    psi += q * Jinv * (0.5 / p.mu0);

    if (p.eta != 0) {
        const S qs = q * Jinv * Jinv;  // spatial b^2 = |F B|^2 / J^2
        const MagEnergyQ w = magnetization_energy_q(value_of(qs), p);
        psi += J * chain(qs, w.w, w.dw_dq, w.d2w_dq2);
    }
    return psi;
}

// psi at a point (plain value).
double total_energy(const PointKinematics& pk, const MaterialParams& p);

} // namespace mmrve
