#pragma once

#include "mmrve/material.hpp"

namespace mmrve::testing {

// Calibrated silicone-matrix / carbonyl-iron-particle parameter set used by
// the shipped configs.
inline MaterialParams reference_matrix() {
    MaterialParams m;
    m.model = MechModel::Yeoh;
    m.K = 1.25e6;
    m.C1 = 1.2595e4;
    m.C2 = 7.0244e1;
    m.C3 = 9.8177;
    m.mu0 = 1.2564e-6;
    m.ms_leg = 8.41e5;
    m.alpha_leg = 2.18e-5;
    m.eta = 0;
    return m;
}

inline MaterialParams reference_particle() {
    MaterialParams p = reference_matrix();
    p.K = 2.5e8;
    p.C1 = 1.0e7;
    p.C2 = 0.0;
    p.C3 = 0.0;
    p.eta = 1;
    return p;
}

inline TwoPhaseMaterial reference_two_phase() {
    return {reference_matrix(), reference_particle()};
}

} // namespace mmrve::testing
