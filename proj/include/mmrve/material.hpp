#pragma once

#include <string>
#include <vector>

namespace mmrve {

enum class Phase { Matrix, Particle };

enum class MechModel { Yeoh, NeoHookeanCompressible };

// Per-phase constitutive constants: Yeoh or compressible Neo-Hookean
// mechanics plus the saturation magnetization model.
struct MaterialParams {
    MechModel model = MechModel::Yeoh;

    double K = 0.0;   // bulk modulus (Pa), Yeoh volumetric penalty
    double C1 = 0.0;  // Yeoh coefficients (Pa)
    double C2 = 0.0;
    double C3 = 0.0;

    double mu_nh = 0.0;     // shear modulus (Pa), Neo-Hookean only
    double kappa_nh = 0.0;  // bulk modulus (Pa), Neo-Hookean only

    double mu0 = 0.0;        // vacuum permeability (H/m)
    double ms_leg = 0.0;     // saturation magnetization (A/m)
    double alpha_leg = 0.0;  // Langevin parameter (m/A)
    int eta = 0;             // magnetization activity flag {0,1}

    // Collects violated invariants; empty when valid.
    std::vector<std::string> validate() const;

    double chi_langevin() const { return ms_leg * alpha_leg / 3.0; }
    double mu_eff() const { return mu0 * (1.0 + chi_langevin()); }
};

struct TwoPhaseMaterial {
    MaterialParams matrix;
    MaterialParams particle;

    const MaterialParams& of(Phase p) const {
        return p == Phase::Matrix ? matrix : particle;
    }
};

} // namespace mmrve
