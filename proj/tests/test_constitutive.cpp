#include "mmrve/constitutive.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_materials.hpp"

using namespace mmrve;
using mmrve::testing::reference_matrix;
using mmrve::testing::reference_particle;

namespace {

Mat3 random_rotation(std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vec3 axis(unif(rng), unif(rng), unif(rng));
    while (axis.norm() < 1e-3) axis = Vec3(unif(rng), unif(rng), unif(rng));
    axis.normalize();
    std::uniform_real_distribution<double> ang(0.0, 3.0);
    return Eigen::AngleAxisd(ang(rng), axis).toRotationMatrix();
}

Mat3 random_near_identity(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Mat3 G;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) G(i, j) = scale * unif(rng);
    return Mat3::Identity() + G;
}

} // namespace

TEST(JbarSplit, IdentityCase) {
    const JbarSplit s = jbar_split(Mat3::Identity(), 1.0);
    EXPECT_TRUE(s.Fbar.isApprox(Mat3::Identity(), 1e-15));
    EXPECT_NEAR(s.I1bar, 3.0, 1e-14);
}

TEST(JbarSplit, NoRescalingWhenJbarEqualsJ) {
    const Mat3 F = Vec3(2.0, 1.0, 1.0).asDiagonal();
    const JbarSplit s = jbar_split(F, 2.0);
    EXPECT_TRUE(s.Fbar.isApprox(F, 1e-15));
    EXPECT_NEAR(s.I1bar, 6.0, 1e-13);
}

TEST(JbarSplit, RescalesToUnitJbar) {
    const Mat3 F = Vec3(2.0, 1.0, 1.0).asDiagonal();
    const JbarSplit s = jbar_split(F, 1.0);
    const double scale = std::pow(2.0, -1.0 / 3.0);
    EXPECT_TRUE(s.Fbar.isApprox(scale * F, 1e-14));
    EXPECT_NEAR(s.Fbar.determinant(), 1.0, 1e-14);
}

TEST(JbarSplit, Idempotent) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat3 F = random_near_identity(rng, 0.2);
        const double jbar = 0.95 + 0.1 * trial / 10.0;
        const JbarSplit once = jbar_split(F, jbar);
        const JbarSplit twice = jbar_split(once.Fbar, jbar);
        EXPECT_TRUE(twice.Fbar.isApprox(once.Fbar, 1e-14));
    }
}

TEST(JbarSplit, RejectsInvalidKinematics) {
    Mat3 F = Mat3::Identity();
    F(0, 0) = -1.0;
    EXPECT_THROW(jbar_split(F, 1.0), InvalidKinematicsError);
    EXPECT_THROW(jbar_split(Mat3::Identity(), -0.5), InvalidKinematicsError);
}

TEST(Langevin, ZeroFieldGivesZero) {
    EXPECT_EQ(solve_langevin_field(0.0, reference_particle()), 0.0);
    EXPECT_EQ(magnetization_energy(0.0, reference_particle()), 0.0);
}

TEST(Langevin, LowFieldLinearization) {
    const MaterialParams p = reference_particle();
    const double chi = p.chi_langevin();
    EXPECT_NEAR(chi, 6.11, 0.01);
    const double h0 = 1.0;
    const double b = p.mu0 * (1.0 + chi) * h0;
    const double h = solve_langevin_field(b, p);
    EXPECT_NEAR(h, h0, 1e-3 * h0);
}

TEST(Langevin, MatchesBisectionOracle) {
    const MaterialParams p = reference_particle();
    const double b = 1.0;
    const double h = solve_langevin_field(b, p);
    const double residual = p.mu0 * (h + p.ms_leg * langevin(p.alpha_leg * h)) - b;
    EXPECT_LT(std::abs(residual), 1e-10);

    // independent bisection on [0, b/mu0]
    double lo = 0.0, hi = b / p.mu0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = p.mu0 * (mid + p.ms_leg * langevin(p.alpha_leg * mid)) - b;
        (r < 0.0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(h, 0.5 * (lo + hi), 1e-9 * hi);
}

TEST(Langevin, FieldIsStrictlyIncreasing) {
    const MaterialParams p = reference_particle();
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double b = 10.0 * i / 100.0;
        const double h = solve_langevin_field(b, p);
        EXPECT_GT(h, prev);
        prev = h;
    }
}

TEST(MagnetizationEnergy, LowFieldEffectivePermeability) {
    const MaterialParams p = reference_particle();
    const double mu_eff = p.mu_eff();
    EXPECT_NEAR(mu_eff, 8.93e-6, 1e-8);
    for (const double b : {1e-5, 1e-4, 1e-3}) {
        const double w = magnetization_energy(b, p);
        EXPECT_NEAR(w, b * b / (2.0 * mu_eff), 0.01 * b * b / (2.0 * mu_eff));
    }
}

TEST(MagnetizationEnergy, LegendreConsistency) {
    // dw/db = h by central differences
    const MaterialParams p = reference_particle();
    for (const double b : {1e-3, 0.1, 0.25, 1.0}) {
        const double db = 1e-6 * std::max(b, 1e-3);
        const double fd =
            (magnetization_energy(b + db, p) - magnetization_energy(b - db, p)) / (2.0 * db);
        const double h = solve_langevin_field(b, p);
        EXPECT_NEAR(fd, h, 1e-6 * std::abs(h));
    }
}

TEST(MagnetizationEnergy, MatchesQuadratureOracle) {
    // w(b) = int_0^b h db' by 64-point Gauss-Legendre on subintervals
    const MaterialParams p = reference_particle();
    const double b = 0.25;
    const int segments = 64;
    const double g = 1.0 / std::sqrt(3.0);
    double integral = 0.0;
    for (int s = 0; s < segments; ++s) {
        const double a0 = b * s / segments, a1 = b * (s + 1) / segments;
        const double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
        integral += half * (solve_langevin_field(mid - g * half, p) +
                            solve_langevin_field(mid + g * half, p));
    }
    const double w = magnetization_energy(b, p);
    EXPECT_NEAR(w, integral, 1e-8 * std::abs(w));
}

TEST(MagnetizationEnergy, QFormDerivativesAreConsistent) {
    const MaterialParams p = reference_particle();
    for (const double b : {1e-8, 1e-7, 1e-5, 1e-2, 0.3}) {
        const double q = b * b;
        const MagEnergyQ m = magnetization_energy_q(q, p);
        EXPECT_NEAR(m.w, magnetization_energy(b, p), 1e-12 * std::max(m.w, 1e-30));
        const double dq = 1e-6 * q;
        const double fd = (magnetization_energy(std::sqrt(q + dq), p) -
                           magnetization_energy(std::sqrt(q - dq), p)) /
                          (2.0 * dq);
        EXPECT_NEAR(m.dw_dq, fd, 2e-5 * std::abs(fd));
    }
}

TEST(TotalEnergy, ReferenceStateIsEnergyFree) {
    PointKinematics pk;
    EXPECT_EQ(total_energy(pk, reference_matrix()), 0.0);
}

TEST(TotalEnergy, VacuumTermOnly) {
    PointKinematics pk;
    const double b = 0.2;
    pk.B = Vec3(0.0, 0.0, b);
    const MaterialParams p = reference_matrix();  // eta = 0
    EXPECT_NEAR(total_energy(pk, p), b * b / (2.0 * p.mu0), 1e-12 * b * b / p.mu0);
}

TEST(TotalEnergy, HandEvaluatedMechanicalEnergy) {
    const MaterialParams p = reference_matrix();
    PointKinematics pk;
    pk.F = Vec3(1.1, 0.9, 1.0 / 0.99).asDiagonal();
    pk.jbar = pk.F.determinant();  // = 1 exactly for this isochoric state
    ASSERT_NEAR(pk.jbar, 1.0, 1e-15);

    const double I1 = pk.F.squaredNorm();
    const double i1_iso = std::pow(pk.F.determinant(), -2.0 / 3.0) * I1;
    const double em = i1_iso - 3.0;
    const double expected = 0.5 * p.K * std::pow(pk.jbar - 1.0, 2) + p.C1 * em +
                            p.C2 * em * em + p.C3 * em * em * em;
    EXPECT_NEAR(total_energy(pk, p), expected, 1e-12 * std::abs(expected));
}

TEST(TotalEnergy, NeoHookeanPhaseUsesPointwiseJacobian) {
    MaterialParams p = reference_particle();
    p.model = MechModel::NeoHookeanCompressible;
    p.mu_nh = 2.0e7;
    p.kappa_nh = 9.333e7;
    p.eta = 0;

    PointKinematics pk;
    pk.F = Vec3(1.05, 1.05, 1.05).asDiagonal();
    pk.jbar = 1.0;  // must be ignored by this phase
    const double J = pk.F.determinant();
    const double i1_iso = std::pow(J, -2.0 / 3.0) * pk.F.squaredNorm();
    const double expected =
        0.5 * p.mu_nh * (i1_iso - 3.0) + 0.5 * p.kappa_nh * std::pow(std::log(J), 2);
    EXPECT_NEAR(total_energy(pk, p), expected, 1e-12 * expected);

    pk.jbar = 2.0;
    EXPECT_EQ(total_energy(pk, p), total_energy({pk.F, pk.B, 1.0}, p));
}

TEST(TotalEnergy, FrameIndifference) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const MaterialParams& p : {reference_matrix(), reference_particle()}) {
        for (int trial = 0; trial < 20; ++trial) {
            PointKinematics pk;
            pk.F = random_near_identity(rng, 0.15);
            pk.B = 0.2 * Vec3(unif(rng), unif(rng), unif(rng));
            pk.jbar = pk.F.determinant() * (1.0 + 0.01 * unif(rng));
            const Mat3 Q = random_rotation(rng);
            PointKinematics rotated{Q * pk.F, pk.B, pk.jbar};
            const double a = total_energy(pk, p);
            const double b = total_energy(rotated, p);
            EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
        }
    }
}

TEST(TotalEnergy, IsotropyInB) {
    // psi depends on B only through F B: (F Q^T, Q B) leaves it unchanged
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const MaterialParams p = reference_particle();
    for (int trial = 0; trial < 20; ++trial) {
        PointKinematics pk;
        pk.F = random_near_identity(rng, 0.15);
        pk.B = 0.25 * Vec3(unif(rng), unif(rng), unif(rng));
        pk.jbar = pk.F.determinant();
        const Mat3 Q = random_rotation(rng);
        PointKinematics mapped{pk.F * Q.transpose(), Q * pk.B, pk.jbar};
        const double a = total_energy(pk, p);
        const double b = total_energy(mapped, p);
        EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
    }
}

TEST(MaterialParams, ValidateFlagsProblems) {
    MaterialParams p = reference_matrix();
    EXPECT_TRUE(p.validate().empty());
    p.K = -1.0;
    p.eta = 2;
    EXPECT_EQ(p.validate().size(), 2u);
}
