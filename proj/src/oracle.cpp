#include "mmrve/oracle.hpp"

namespace mmrve {

namespace {
inline double kron(int i, int j) { return i == j ? 1.0 : 0.0; }
}

SmallStrainCoefficients small_strain_coefficients(const MaterialParams& params, int eta) {
    SmallStrainCoefficients c;
    c.chi_L = params.chi_langevin();
    c.mu_eff = params.mu0 * (1.0 + c.chi_L);
    c.E_lin = 6.0 * params.C1;

    const double coupling = 1.0 / params.mu0 + (eta != 0 ? 1.0 / c.mu_eff : 0.0);

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n)
                    c.Gamma[i][j][m][n] = -0.5 * coupling *
                        (kron(i, m) * kron(j, n) + kron(i, n) * kron(j, m) -
                         kron(i, j) * kron(m, n));

    // Compliance action in the incompressible isotropic limit: the induced
    // strain is trace-free, eps = 3/(2E) dev(Gamma : B x B), so
    // Lambda_ijmn = 3/(2E) (Gamma_ijmn - delta_ij Gamma_ppmn / 3).
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            double trace = 0.0;
            for (int p = 0; p < 3; ++p) trace += c.Gamma[p][p][m][n];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    c.Lambda[i][j][m][n] = 1.5 / c.E_lin *
                        (c.Gamma[i][j][m][n] - kron(i, j) * trace / 3.0);
        }
    return c;
}

Mat3 predicted_strain(const SmallStrainCoefficients& coeffs, const Vec3& B) {
    Mat3 eps = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) eps(i, j) += coeffs.Lambda[i][j][m][n] * B[m] * B[n];
    return eps;
}

Vec3 rve_scale_coefficients(const Mat3& F_avg, double B_final) {
    if (!(B_final > 0.0))
        throw std::invalid_argument("rve_scale_coefficients: B_final must be positive");
    const double b2 = B_final * B_final;
    return {(F_avg(0, 0) - 1.0) / b2, (F_avg(1, 1) - 1.0) / b2, (F_avg(2, 2) - 1.0) / b2};
}

} // namespace mmrve
