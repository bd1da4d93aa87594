#pragma once

#include "mmrve/constitutive.hpp"

namespace mmrve {

// Closed-form small-strain, low-field magnetostriction expansion used as an
// independent cross-check of the FEM pipeline. Works in the isotropic,
// nearly incompressible limit with E = 6 C1.
struct SmallStrainCoefficients {
    double chi_L = 0.0;    // ms * alpha / 3
    double mu_eff = 0.0;   // mu0 (1 + chi_L)
    double E_lin = 0.0;    // 6 C1
    double Gamma[3][3][3][3] = {};   // magnetoelastic coupling (1/(H/m))
    double Lambda[3][3][3][3] = {};  // magnetostriction tensor (1/T^2)
};

SmallStrainCoefficients small_strain_coefficients(const MaterialParams& params, int eta);

// eps_ij = Lambda_ijmn B_m B_n.
Mat3 predicted_strain(const SmallStrainCoefficients& coeffs, const Vec3& B);

// RVE-scale coefficients Lambda_ii33 = lambda_ii / B_final^2 from a final
// homogenized deformation under a z-aligned magnetic ramp.
Vec3 rve_scale_coefficients(const Mat3& F_avg, double B_final);

} // namespace mmrve
