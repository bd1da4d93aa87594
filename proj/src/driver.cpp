#include "mmrve/driver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace mmrve {

RveProblem::RveProblem(const Mesh& mesh, const TwoPhaseMaterial& materials,
                       const QuadratureRule& rule)
    : mesh_(mesh), dofs_(mesh_) {
    assembler_ = std::make_unique<Assembler>(mesh_, dofs_, materials, rule);

    const FacePairing pairing = pair_periodic_entities(mesh_);
    ConstraintSet periodic = mechanical_periodicity(pairing, mesh_, dofs_, Mat3::Identity());
    periodic.merge(magnetic_periodicity(pairing, dofs_));
    ConstraintSet probe = periodic;  // follower lookup for anchor/gauge selection
    probe.finalize();
    periodic.merge(anchor_and_gauge(mesh_, dofs_, probe));
    periodic.finalize();
    constraints_ = std::move(periodic);
    reduction_ = make_reduction(constraints_, dofs_.n_total());
}

Eigen::VectorXd RveProblem::full_state(const Mat3& F_M, const Eigen::VectorXd& y) const {
    return expand_state(reduction_, y, constraints_.offset_vector_for(dofs_.n_total(), F_M));
}

NewtonReport RveProblem::solve(const Mat3& F_M, const Vec3& B_M, Eigen::VectorXd& y,
                               const NewtonSettings& settings, std::ostream* log,
                               int step_id) const {
    const Eigen::VectorXd s = constraints_.offset_vector_for(dofs_.n_total(), F_M);
    return newton_solve(*assembler_, reduction_, s, B_M, y, settings, log, step_id);
}

std::pair<Mat3, Vec3> loads_at(double t, const LoadPath& path) {
    Mat3 F = Mat3::Identity() + t * (path.F_final - Mat3::Identity());
    Vec3 B = t * path.B_final;
    switch (path.kind) {
        case LoadKind::Mechanical:
            B.setZero();
            break;
        case LoadKind::Magnetic:
        case LoadKind::StressRelaxedMagnetic:
            F = Mat3::Identity();
            break;
        case LoadKind::Combined:
        case LoadKind::UniaxialIsochoricPlusMagnetic:
            break;
    }
    if (path.isochoric_zz && path.kind != LoadKind::Magnetic &&
        path.kind != LoadKind::StressRelaxedMagnetic)
        F(2, 2) = 1.0 / (F(0, 0) * F(1, 1));
    return {F, B};
}

namespace {

const std::array<std::pair<int, int>, 6> kVoigt = {{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

Eigen::Matrix<double, 6, 1> voigt(const Mat3& M) {
    Eigen::Matrix<double, 6, 1> v;
    for (int i = 0; i < 6; ++i) v[i] = 0.5 * (M(kVoigt[i].first, kVoigt[i].second) +
                                              M(kVoigt[i].second, kVoigt[i].first));
    return v;
}

Mat3 from_voigt(const Eigen::Matrix<double, 6, 1>& v) {
    Mat3 M;
    for (int i = 0; i < 6; ++i) {
        M(kVoigt[i].first, kVoigt[i].second) = v[i];
        M(kVoigt[i].second, kVoigt[i].first) = v[i];
    }
    return M;
}

} // namespace

StressRelaxResult stress_relaxed_step(const RveProblem& problem, const Vec3& B_M,
                                      const std::vector<int>& targets, double tol,
                                      Mat3& U, Eigen::VectorXd& y, double& sigma_ref,
                                      const NewtonSettings& settings, std::ostream* log,
                                      int step_id) {
    StressRelaxResult result;
    const int nt = static_cast<int>(targets.size());
    constexpr int kMaxOuter = 30;
    constexpr double kFdStep = 1e-6;

    Eigen::Matrix<double, 6, 1> m = voigt(U);

    auto solve_at = [&](const Eigen::Matrix<double, 6, 1>& mv, Eigen::VectorXd& yy,
                        Eigen::Matrix<double, 6, 1>& sigma) -> bool {
        const Mat3 F_M = from_voigt(mv);
        if (F_M.determinant() <= 0.0) return false;
        const NewtonReport rep = problem.solve(F_M, B_M, yy, settings, log, step_id);
        result.newton_iterations += rep.iterations;
        if (!rep.converged) return false;
        const Eigen::VectorXd x = problem.full_state(F_M, yy);
        sigma = voigt(average_all(problem.assembler(), x, B_M).sigma_avg);
        return true;
    };

    Eigen::Matrix<double, 6, 1> sigma;
    if (!solve_at(m, y, sigma))
        throw SolverFailure("stress_relaxed_step: RVE solve failed at the initial iterate");

    for (int outer = 0; outer < kMaxOuter; ++outer) {
        sigma_ref = std::max(sigma_ref, sigma.cwiseAbs().maxCoeff());

        Eigen::VectorXd res(nt);
        for (int i = 0; i < nt; ++i) res[i] = sigma[targets[i]];
        const double err = res.cwiseAbs().maxCoeff() / sigma_ref;
        if (log && settings.verbosity > 0)
            *log << "relax,step=" << step_id << ",outer=" << outer << ",err=" << err << "\n";
        if (err <= tol) {
            result.converged = true;
            result.outer_iterations = outer;
            result.F_M = from_voigt(m);
            U = result.F_M;
            return result;
        }

        // forward-difference Jacobian of the selected stress components
        Eigen::MatrixXd Jac(nt, 6);
        for (int j = 0; j < 6; ++j) {
            Eigen::Matrix<double, 6, 1> mp = m;
            mp[j] += kFdStep;
            Eigen::VectorXd y_fd = y;
            Eigen::Matrix<double, 6, 1> sigma_p;
            if (!solve_at(mp, y_fd, sigma_p))
                throw SolverFailure("stress_relaxed_step: FD probe solve failed");
            for (int i = 0; i < nt; ++i) Jac(i, j) = (sigma_p[targets[i]] - sigma[targets[i]]) / kFdStep;
        }

        Eigen::Matrix<double, 6, 1> dm =
            -Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(Jac).solve(res);

        // keep the trial stretch invertible and the inner solve convergent
        bool advanced = false;
        for (int cut = 0; cut < 6; ++cut) {
            Eigen::Matrix<double, 6, 1> m_try = m + dm;
            Eigen::VectorXd y_try = y;
            Eigen::Matrix<double, 6, 1> sigma_try;
            if (solve_at(m_try, y_try, sigma_try)) {
                m = m_try;
                y = y_try;
                sigma = sigma_try;
                advanced = true;
                break;
            }
            dm *= 0.5;
        }
        if (!advanced) break;
    }

    result.converged = false;
    result.outer_iterations = kMaxOuter;
    result.F_M = from_voigt(m);
    U = result.F_M;
    return result;
}

RunResult run_path(const RveProblem& problem, const LoadPath& path,
                   const NewtonSettings& settings, std::ostream* log,
                   const StepCallback& on_step) {
    RunResult result;
    Eigen::VectorXd y = problem.zero_reduced_state();
    Mat3 U = Mat3::Identity();
    double sigma_ref = problem.assembler().materials().matrix.model == MechModel::Yeoh
                           ? problem.assembler().materials().matrix.C1
                           : problem.assembler().materials().matrix.mu_nh;

    double t_prev = 0.0;
    for (int step = 1; step <= path.steps; ++step) {
        const double t_target = double(step) / path.steps;
        int iters_this_step = 0;

        if (path.kind == LoadKind::StressRelaxedMagnetic) {
            const Vec3 B_M = t_target * path.B_final;
            StressRelaxResult rr;
            try {
                rr = stress_relaxed_step(problem, B_M, path.relaxed_components, path.stress_tol,
                                         U, y, sigma_ref, settings, log, step);
            } catch (const std::runtime_error& err) {
                result.completed = false;
                result.error = err.what();
                return result;
            }
            if (!rr.converged) {
                result.completed = false;
                result.error = "stress relaxation did not converge";
                return result;
            }
            const Eigen::VectorXd x = problem.full_state(rr.F_M, y);
            HomogenizedRecord rec = average_all(problem.assembler(), x, B_M);
            rec.t = t_target;
            rec.newton_iters = rr.newton_iterations;
            result.records.push_back(rec);
            if (on_step) on_step(step, rec, x);
            t_prev = t_target;
            continue;
        }

        // adaptive substepping toward the nominal time
        double t = t_prev;
        double dt = t_target - t_prev;
        int halvings = 0;
        bool step_failed = false;
        while (t < t_target - 1e-14) {
            const double t_try = std::min(t + dt, t_target);
            const auto [F_M, B_M] = loads_at(t_try, path);
            Eigen::VectorXd y_try = y;
            const NewtonReport rep = problem.solve(F_M, B_M, y_try, settings, log, step);
            iters_this_step += rep.iterations;
            if (rep.converged) {
                y = y_try;
                t = t_try;
            } else {
                if (++halvings > settings.max_step_halvings) {
                    step_failed = true;
                    break;
                }
                dt *= 0.5;
            }
        }
        if (step_failed) {
            result.completed = false;
            std::ostringstream os;
            os << "step " << step << " failed after " << settings.max_step_halvings
               << " halvings";
            result.error = os.str();
            return result;
        }

        const auto [F_M, B_M] = loads_at(t_target, path);
        const Eigen::VectorXd x = problem.full_state(F_M, y);
        HomogenizedRecord rec = average_all(problem.assembler(), x, B_M);
        rec.t = t_target;
        rec.newton_iters = iters_this_step;
        result.records.push_back(rec);
        if (on_step) on_step(step, rec, x);
        t_prev = t_target;
    }
    return result;
}

} // namespace mmrve
