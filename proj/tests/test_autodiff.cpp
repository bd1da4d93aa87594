#include "mmrve/autodiff.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_materials.hpp"

using namespace mmrve;
using mmrve::testing::reference_matrix;
using mmrve::testing::reference_particle;

namespace {

PointKinematics random_state(std::mt19937& rng, double strain = 0.2, double field = 0.25) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    PointKinematics pk;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) pk.F(i, j) += strain / 3.0 * unif(rng);
    for (int k = 0; k < 3; ++k) pk.B[k] = field * unif(rng) / std::sqrt(3.0);
    pk.jbar = pk.F.determinant() * (1.0 + 0.02 * unif(rng));
    return pk;
}

// central finite differences of psi in the 13 variables (F, B, jbar)
struct FdDerivatives {
    Eigen::Matrix<double, 13, 1> grad;
    Eigen::Matrix<double, 13, 13> hess;
};

double psi_at(const PointKinematics& pk, const MaterialParams& p,
              const Eigen::Matrix<double, 13, 1>& delta) {
    PointKinematics q = pk;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q.F(i, j) += delta[flat(i, j)];
    for (int k = 0; k < 3; ++k) q.B[k] += delta[9 + k];
    q.jbar += delta[12];
    return total_energy(q, p);
}

// Central differences with per-variable steps: the tight 1e-6 step is right
// for gradients but amplifies round-off in second differences, so the Hessian
// sampling uses wider steps (F, jbar: 1e-5; B: 1e-4).
FdDerivatives fd_derivatives(const PointKinematics& pk, const MaterialParams& p) {
    FdDerivatives out;
    using V = Eigen::Matrix<double, 13, 1>;
    const double hg = 1e-6;
    for (int i = 0; i < 13; ++i) {
        V e = V::Zero();
        e[i] = hg;
        out.grad[i] = (psi_at(pk, p, e) - psi_at(pk, p, -e)) / (2.0 * hg);
    }
    auto step = [](int i) { return (i >= 9 && i < 12) ? 1e-4 : 1e-5; };
    const double base = psi_at(pk, p, V::Zero());
    for (int i = 0; i < 13; ++i)
        for (int j = i; j < 13; ++j) {
            const double hi = step(i), hj = step(j);
            V ei = V::Zero(), ej = V::Zero();
            ei[i] = hi;
            ej[j] = hj;
            double v;
            if (i == j) {
                v = (psi_at(pk, p, ei) - 2.0 * base + psi_at(pk, p, -ei)) / (hi * hi);
            } else {
                v = (psi_at(pk, p, ei + ej) - psi_at(pk, p, ei - ej) - psi_at(pk, p, ej - ei) +
                     psi_at(pk, p, -ei - ej)) /
                    (4.0 * hi * hj);
            }
            out.hess(i, j) = v;
            out.hess(j, i) = v;
        }
    return out;
}

double rel_error(double got, double want, double scale) {
    return std::abs(got - want) / scale;
}

} // namespace

TEST(EnergyDerivatives, StressFreeReference) {
    PointKinematics pk;
    const PointDerivatives d = energy_derivatives(pk, reference_matrix());
    EXPECT_LT(d.P.cwiseAbs().maxCoeff(), 1e-12 * reference_matrix().C1);
    EXPECT_LT(d.H.norm(), 1e-20);
    // the jbar channel vanishes at the reference too
    const PointDerivatives dj = energy_derivatives_jbar(pk, reference_matrix());
    EXPECT_NEAR(dj.S1, 0.0, 1e-9);
}

TEST(EnergyDerivatives, VacuumFieldGradient) {
    PointKinematics pk;
    const double b = 0.15;
    pk.B = Vec3(0.0, 0.0, b);
    const MaterialParams p = reference_matrix();
    const PointDerivatives d = energy_derivatives(pk, p);
    EXPECT_NEAR(d.H[2], b / p.mu0, 1e-10 * b / p.mu0);
    EXPECT_NEAR(d.H[0], 0.0, 1e-9);
    EXPECT_NEAR(d.H[1], 0.0, 1e-9);
}

TEST(EnergyDerivatives, MatchesFiniteDifferences) {
    std::mt19937 rng(123);
    for (const MaterialParams& p : {reference_matrix(), reference_particle()}) {
        for (int trial = 0; trial < 8; ++trial) {
            const PointKinematics pk = random_state(rng);
            const PointDerivatives ad = energy_derivatives_jbar(pk, p);
            const FdDerivatives fd = fd_derivatives(pk, p);

            // gradients: P, H, S1
            double pscale = 0.0, hscale = 0.0;
            for (int i = 0; i < 9; ++i) pscale = std::max(pscale, std::abs(fd.grad[i]));
            for (int k = 0; k < 3; ++k) hscale = std::max(hscale, std::abs(fd.grad[9 + k]));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    EXPECT_LT(rel_error(ad.P(i, j), fd.grad[flat(i, j)], pscale), 1e-5);
            for (int k = 0; k < 3; ++k)
                EXPECT_LT(rel_error(ad.H[k], fd.grad[9 + k], hscale), 1e-5);
            EXPECT_LT(rel_error(ad.S1, fd.grad[12], std::max(pscale, std::abs(fd.grad[12]))), 1e-5);

            // second derivatives, block by block against the FD Hessian
            const auto hb = fd.hess;
            const double ascale = hb.block<9, 9>(0, 0).cwiseAbs().maxCoeff();
            const double cscale = hb.block<9, 3>(0, 9).cwiseAbs().maxCoeff();
            const double escale = hb.block<3, 3>(9, 9).cwiseAbs().maxCoeff();
            for (int a = 0; a < 9; ++a) {
                for (int b = 0; b < 9; ++b)
                    EXPECT_LT(rel_error(ad.A(a, b), hb(a, b), ascale), 1e-5);
                for (int k = 0; k < 3; ++k) {
                    EXPECT_LT(rel_error(ad.C(a, k), hb(a, 9 + k), cscale), 1e-5);
                    EXPECT_LT(rel_error(ad.D(k, a), hb(9 + k, a), cscale), 1e-5);
                }
            }
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    EXPECT_LT(rel_error(ad.E(k, l), hb(9 + k, 9 + l), escale), 1e-5);

            // jbar cross terms
            const double mscale =
                std::max({hb.block<9, 1>(0, 12).cwiseAbs().maxCoeff(), std::abs(hb(12, 12)), 1.0});
            for (int a = 0; a < 9; ++a) EXPECT_LT(rel_error(ad.MF[a], hb(a, 12), mscale), 1e-5);
            EXPECT_LT(rel_error(ad.S2, hb(12, 12), mscale), 1e-5);
            // the magnetic terms never see jbar
            EXPECT_LT(ad.MB.norm(), 1e-20);
        }
    }
}

TEST(EnergyDerivatives, HessianSymmetry) {
    std::mt19937 rng(321);
    for (int trial = 0; trial < 50; ++trial) {
        const PointKinematics pk = random_state(rng);
        const MaterialParams p = (trial % 2 == 0) ? reference_matrix() : reference_particle();
        const PointDerivatives d = energy_derivatives_jbar(pk, p);
        const double scale = d.A.cwiseAbs().maxCoeff();
        EXPECT_LT((d.A - d.A.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
        // mixed blocks are each other's transpose, exactly
        for (int a = 0; a < 9; ++a)
            for (int k = 0; k < 3; ++k) EXPECT_EQ(d.C(a, k), d.D(k, a));
        EXPECT_EQ((d.E - d.E.transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(EnergyDerivatives, JbarChainRuleOnDiagonalState) {
    // For a Yeoh phase with C2 = C3 = 0 the fixed-jbar stress on a diagonal
    // state has the closed form P = 2 C1 J^(-2/3) (F - I1/3 F^-T).
    MaterialParams p = reference_matrix();
    p.C2 = p.C3 = 0.0;
    PointKinematics pk;
    pk.F = Vec3(1.2, 0.95, 1.05).asDiagonal();
    pk.jbar = 1.1;  // held fixed; the isochoric part does not see it
    const double J = pk.F.determinant();
    const double I1 = pk.F.squaredNorm();
    const Mat3 expected = 2.0 * p.C1 * std::pow(J, -2.0 / 3.0) *
                          (pk.F - I1 / 3.0 * pk.F.inverse().transpose());
    const PointDerivatives d = energy_derivatives(pk, p);
    EXPECT_TRUE(d.P.isApprox(expected, 1e-12));
}

TEST(EnergyDerivatives, ImplicitLangevinDerivative) {
    // At F = I the magnetic Hessian in the field direction is
    // E_zz = 1/mu0 + dh/db; dh/db comes from the implicit function theorem.
    const MaterialParams p = reference_particle();
    for (const double b : {1e-3, 0.05, 0.25, 0.8}) {
        PointKinematics pk;
        pk.B = Vec3(0.0, 0.0, b);
        const PointDerivatives d = energy_derivatives(pk, p);
        const double h = solve_langevin_field(b, p);
        const double slope = langevin_field_slope(h, p);
        EXPECT_NEAR(d.E(2, 2), 1.0 / p.mu0 + slope, 1e-8 * (1.0 / p.mu0 + slope));
    }
}

TEST(EnergyDerivatives, RejectsNonFinite) {
    PointKinematics pk;
    pk.F(0, 0) = -2.0;  // det < 0
    EXPECT_THROW(energy_derivatives(pk, reference_matrix()), InvalidKinematicsError);
}
