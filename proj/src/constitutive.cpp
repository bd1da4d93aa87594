#include "mmrve/constitutive.hpp"

#include <algorithm>
#include <sstream>

namespace mmrve {

namespace {

// Branch points for the stable evaluations. The series branch extends to
// x = 0.05: below that, coth(x) - 1/x loses enough digits to cancellation
// that the 1e-14 T inversion tolerance becomes unreachable, while the
// series truncation error is still ~1e-15 relative.
constexpr double kSeriesX = 0.05;
constexpr double kAsymptoticX = 20.0;  // asymptotic branch of ln(sinh x / x)
constexpr double kSmallB = 1e-6;       // quartic expansion of w(b) below this (T)

constexpr double kLangevinRtol = 1e-12;
constexpr double kLangevinAtol = 1e-14;  // T
constexpr int kLangevinMaxIter = 100;

} // namespace

std::vector<std::string> MaterialParams::validate() const {
    std::vector<std::string> problems;
    if (model == MechModel::Yeoh) {
        if (!(K > 0.0)) problems.push_back("K must be > 0");
        if (!(C1 > 0.0)) problems.push_back("C1 must be > 0");
    } else {
        if (!(mu_nh > 0.0)) problems.push_back("mu_nh must be > 0");
        if (!(kappa_nh > 0.0)) problems.push_back("kappa_nh must be > 0");
    }
    if (!(mu0 > 0.0)) problems.push_back("mu0 must be > 0");
    if (ms_leg < 0.0) problems.push_back("ms_leg must be >= 0");
    if (!(alpha_leg > 0.0)) problems.push_back("alpha_leg must be > 0");
    if (eta != 0 && eta != 1) problems.push_back("eta must be 0 or 1");
    return problems;
}

double langevin(double x) {
    const double ax = std::abs(x);
    if (ax < kSeriesX) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0))));
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

double langevin_prime(double x) {
    const double ax = std::abs(x);
    if (ax < kSeriesX) {
        const double x2 = x * x;
        return 1.0 / 3.0 + x2 * (-1.0 / 15.0 + x2 * (2.0 / 189.0 + x2 * (-1.0 / 675.0)));
    }
    if (ax > kAsymptoticX) {
        // 1/sinh^2 = 4 e^{-2x} / (1 - e^{-2x})^2; the correction is negligible
        return 1.0 / (x * x) - 4.0 * std::exp(-2.0 * ax);
    }
    const double s = std::sinh(x);
    return 1.0 / (x * x) - 1.0 / (s * s);
}

double log_sinhc(double x) {
    const double ax = std::abs(x);
    if (ax < kSeriesX) {
        const double x2 = x * x;
        return x2 * (1.0 / 6.0 + x2 * (-1.0 / 180.0 + x2 * (1.0 / 2835.0)));
    }
    if (ax > kAsymptoticX) return ax - std::log(2.0 * ax);
    return std::log(std::sinh(ax) / ax);
}

double solve_langevin_field(double b, const MaterialParams& p) {
    if (b < 0.0) throw InvalidKinematicsError("solve_langevin_field: b < 0");
    if (b == 0.0) return 0.0;
    if (p.ms_leg == 0.0) return b / p.mu0;

    double lo = 0.0;
    double hi = b / p.mu0;  // residual(hi) = mu0*ms*L(...) >= 0
    double h = b / p.mu_eff();

    for (int it = 0; it < kLangevinMaxIter; ++it) {
        const double r = p.mu0 * (h + p.ms_leg * langevin(p.alpha_leg * h)) - b;
        if (std::abs(r) <= kLangevinRtol * b + kLangevinAtol) return h;
        if (r < 0.0) lo = h; else hi = h;
        const double dr = p.mu0 * (1.0 + p.ms_leg * p.alpha_leg * langevin_prime(p.alpha_leg * h));
        double h_next = h - r / dr;
        if (!(h_next > lo && h_next < hi)) h_next = 0.5 * (lo + hi);
        h = h_next;
    }
    std::ostringstream os;
    os << "solve_langevin_field: no convergence for b = " << b << " T";
    throw SolverFailure(os.str());
}

double langevin_field_slope(double h, const MaterialParams& p) {
    return 1.0 / (p.mu0 * (1.0 + p.ms_leg * p.alpha_leg * langevin_prime(p.alpha_leg * h)));
}

double magnetization_energy(double b, const MaterialParams& p) {
    if (b == 0.0) return 0.0;
    const double h = solve_langevin_field(b, p);
    const double wstar = (p.ms_leg > 0.0)
        ? p.mu0 * p.ms_leg / p.alpha_leg * log_sinhc(p.alpha_leg * h)
        : 0.0;
    return b * h - 0.5 * p.mu0 * h * h - wstar;
}

MagEnergyQ magnetization_energy_q(double q, const MaterialParams& p) {
    MagEnergyQ out;
    const double mu_eff = p.mu_eff();
    if (q <= kSmallB * kSmallB) {
        // w(b) = b^2/(2 mu_eff) + c2 b^4 + O(b^6), exact to round-off here
        const double me2 = mu_eff * mu_eff;
        const double c2 = p.mu0 * p.ms_leg * std::pow(p.alpha_leg, 3) / (180.0 * me2 * me2);
        out.w = q * (0.5 / mu_eff) + c2 * q * q;
        out.dw_dq = 0.5 / mu_eff + 2.0 * c2 * q;
        out.d2w_dq2 = 2.0 * c2;
        return out;
    }
    const double b = std::sqrt(q);
    const double h = solve_langevin_field(b, p);
    const double hp = langevin_field_slope(h, p);
    const double wstar = (p.ms_leg > 0.0)
        ? p.mu0 * p.ms_leg / p.alpha_leg * log_sinhc(p.alpha_leg * h)
        : 0.0;
    out.w = b * h - 0.5 * p.mu0 * h * h - wstar;
    out.dw_dq = h / (2.0 * b);        // dw/db = h
    out.d2w_dq2 = hp / (4.0 * q) - h / (4.0 * q * b);
    return out;
}

JbarSplit jbar_split(const Mat3& F, double jbar) {
    const double J = F.determinant();
    if (J <= 0.0) throw InvalidKinematicsError("jbar_split: det(F) <= 0");
    if (jbar <= 0.0) throw InvalidKinematicsError("jbar_split: jbar <= 0");
    JbarSplit out;
    out.Fbar = std::cbrt(jbar / J) * F;
    out.I1bar = out.Fbar.squaredNorm();
    return out;
}

double total_energy(const PointKinematics& pk, const MaterialParams& p) {
    std::array<double, 9> F;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) F[3 * i + j] = pk.F(i, j);
    const std::array<double, 3> B{pk.B[0], pk.B[1], pk.B[2]};
    if (pk.jbar <= 0.0) throw InvalidKinematicsError("total_energy: jbar <= 0");
    return energy_density<double>(F, B, pk.jbar, p);
}

} // namespace mmrve
