#include "mmrve/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <ostream>
#include <sstream>

namespace mmrve {

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                             LinearBackend backend) {
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(rhs.size());

    Eigen::VectorXd x;
    if (backend == LinearBackend::Direct) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success)
            throw SingularSystemError(
                "linear_solve: factorization failed (singular system; check that the gauge "
                "tree and the displacement anchor are in place)");
        x = lu.solve(rhs);
        // one refinement pass tightens the residual to the 1e-10 contract
        Eigen::VectorXd r = rhs - K * x;
        x += lu.solve(r);
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
        solver.preconditioner().setDroptol(1e-8);
        solver.preconditioner().setFillfactor(40);
        solver.setTolerance(1e-12);
        solver.setMaxIterations(20000);
        solver.compute(K);
        if (solver.info() != Eigen::Success)
            throw SingularSystemError(
                "linear_solve: preconditioner failed (singular system; check gauge/anchor)");
        x = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw SolverFailure("linear_solve: iterative solver stagnated; retry with the "
                                "direct backend");
    }

    const double rel = (rhs - K * x).norm() / rhs_norm;
    if (!(rel <= 1e-10)) {
        std::ostringstream os;
        os << "linear_solve: relative residual " << rel
           << " exceeds 1e-10 (near-singular system; check gauge/anchor)";
        throw SingularSystemError(os.str());
    }
    return x;
}

NewtonReport newton_solve(const Assembler& assembler, const Reduction& red,
                          const Eigen::VectorXd& s, const Vec3& B_M, Eigen::VectorXd& y,
                          const NewtonSettings& settings, std::ostream* log, int step_id) {
    NewtonReport report;

    auto reduced_residual = [&](const Eigen::VectorXd& yy) {
        const Eigen::VectorXd x = expand_state(red, yy, s);
        return condense_residual(assembler.residual(x, B_M), red);
    };

    Eigen::VectorXd Rr = reduced_residual(y);
    double rnorm = Rr.norm();
    const double r0 = rnorm;
    report.residual_norms.push_back(rnorm);
    if (log && settings.verbosity > 0)
        *log << "newton,step=" << step_id << ",iter=0,res=" << rnorm << ",alpha=1\n";

    for (int it = 0; it < settings.max_iterations; ++it) {
        if (rnorm <= settings.atol + settings.rtol * r0) {
            report.converged = true;
            report.iterations = it;
            return report;
        }

        const Eigen::VectorXd x = expand_state(red, y, s);
        Assembler::Request req;
        req.tangent = true;
        const auto sys = assembler.assemble(x, B_M, req);
        const Eigen::SparseMatrix<double> Kr = condense_matrix(sys.K, red);
        const Eigen::VectorXd Rr_full = condense_residual(sys.R, red);
        const Eigen::VectorXd d = linear_solve(Kr, Eigen::VectorXd(-Rr_full), settings.backend);

        double alpha = 1.0;
        bool accepted = false;
        for (int cut = 0; cut <= (settings.line_search ? settings.ls_max_cuts : 0); ++cut) {
            try {
                const Eigen::VectorXd y_try = y + alpha * d;
                const Eigen::VectorXd Rr_try = reduced_residual(y_try);
                const double rn_try = Rr_try.norm();
                const bool ok = std::isfinite(rn_try) &&
                                (settings.line_search ? (rn_try < rnorm) : true);
                if (ok) {
                    y = y_try;
                    Rr = Rr_try;
                    rnorm = rn_try;
                    accepted = true;
                    break;
                }
            } catch (const MeshError&) {
                // inverted element on the trial state: cut the step
            } catch (const EvaluationFailure&) {
            } catch (const SolverFailure&) {
            }
            alpha *= settings.ls_factor;
        }
        report.residual_norms.push_back(rnorm);
        if (log && settings.verbosity > 0)
            *log << "newton,step=" << step_id << ",iter=" << (it + 1) << ",res=" << rnorm
                 << ",alpha=" << alpha << "\n";
        if (!accepted) {
            report.converged = false;
            report.iterations = it + 1;
            return report;
        }
    }

    report.converged = rnorm <= settings.atol + settings.rtol * r0;
    report.iterations = settings.max_iterations;
    return report;
}

} // namespace mmrve
