#include "mmrve/autodiff.hpp"

#include <cmath>
#include <sstream>

namespace mmrve {

namespace {

template <class D>
void seed(const PointKinematics& pk, std::array<D, 9>& F, std::array<D, 3>& B) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) F[flat(i, j)] = D::variable(pk.F(i, j), flat(i, j));
    for (int k = 0; k < 3; ++k) B[k] = D::variable(pk.B[k], 9 + k);
}

PointDerivatives extract(const DualAsm2& e) {
    PointDerivatives out;
    out.psi = e.val;
    for (int a = 0; a < 9; ++a) {
        out.P(a / 3, a % 3) = e.grad[a];
        for (int b = 0; b < 9; ++b) out.A(a, b) = e.hess(a, b);
        for (int k = 0; k < 3; ++k) out.C(a, k) = e.hess(a, 9 + k);
        out.MF[a] = e.hess(a, 12);
    }
    for (int k = 0; k < 3; ++k) {
        out.H[k] = e.grad[9 + k];
        for (int a = 0; a < 9; ++a) out.D(k, a) = e.hess(9 + k, a);
        for (int l = 0; l < 3; ++l) out.E(k, l) = e.hess(9 + k, 9 + l);
        out.MB[k] = e.hess(9 + k, 12);
    }
    out.S1 = e.grad[12];
    out.S2 = e.hess(12, 12);

    if (!std::isfinite(out.psi) || !out.P.allFinite() || !out.H.allFinite() ||
        !out.A.allFinite() || !out.C.allFinite() || !out.E.allFinite() ||
        !std::isfinite(out.S1) || !std::isfinite(out.S2))
        throw EvaluationFailure("energy_derivatives: non-finite derivative");
    return out;
}

} // namespace

PointDerivatives energy_derivatives_jbar(const PointKinematics& pk, const MaterialParams& p) {
    std::array<DualAsm2, 9> F;
    std::array<DualAsm2, 3> B;
    seed(pk, F, B);
    const DualAsm2 jbar = DualAsm2::variable(pk.jbar, 12);
    return extract(energy_density(F, B, jbar, p));
}

PointDerivatives energy_derivatives(const PointKinematics& pk, const MaterialParams& p) {
    std::array<DualAsm2, 9> F;
    std::array<DualAsm2, 3> B;
    seed(pk, F, B);
    const DualAsm2 jbar(pk.jbar);  // held fixed
    PointDerivatives out = extract(energy_density(F, B, jbar, p));
    out.S1 = out.S2 = 0.0;
    out.MF.setZero();
    out.MB.setZero();
    return out;
}

PointStress energy_stress(const PointKinematics& pk, const MaterialParams& p) {
    std::array<DualAsm1, 9> F;
    std::array<DualAsm1, 3> B;
    seed(pk, F, B);
    const DualAsm1 jbar = DualAsm1::variable(pk.jbar, 12);
    const DualAsm1 e = energy_density(F, B, jbar, p);

    PointStress out;
    out.psi = e.val;
    for (int a = 0; a < 9; ++a) out.P(a / 3, a % 3) = e.grad[a];
    for (int k = 0; k < 3; ++k) out.H[k] = e.grad[9 + k];
    out.S1 = e.grad[12];
    if (!std::isfinite(out.psi) || !out.P.allFinite() || !out.H.allFinite() ||
        !std::isfinite(out.S1))
        throw EvaluationFailure("energy_stress: non-finite derivative");
    return out;
}

Mat3 total_pk1(const PointKinematics& pk, const MaterialParams& p) {
    const PointStress s = energy_stress(pk, p);
    const Mat3 cof = pk.F.determinant() * pk.F.inverse().transpose();
    return s.P + s.S1 * cof;
}

} // namespace mmrve
