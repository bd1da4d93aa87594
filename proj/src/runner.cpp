#include "mmrve/runner.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

#include "mmrve/oracle.hpp"
#include "mmrve/version.hpp"

namespace mmrve {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void csv_header(std::ostream& os, const RunConfig& config) {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash(config));
    os << "# schema=" << kCsvSchema << "\n";
    os << "# version=mmrve " << kVersion << "\n";
    os << "# config_hash=" << hash << "\n";
    os << "t";
    const char* ax = "xyz";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",F_" << ax[i] << ax[j];
    for (int i = 0; i < 3; ++i) os << ",B_" << ax[i];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",P_" << ax[i] << ax[j];
    for (int i = 0; i < 3; ++i) os << ",H_" << ax[i];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",sigma_" << ax[i] << ax[j];
    os << ",J_avg,psi_avg,newton_iters\n";
}

void csv_row(std::ostream& os, const HomogenizedRecord& rec) {
    os << fmt17(rec.t);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << "," << fmt17(rec.F_avg(i, j));
    for (int i = 0; i < 3; ++i) os << "," << fmt17(rec.B_avg[i]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << "," << fmt17(rec.P_avg(i, j));
    for (int i = 0; i < 3; ++i) os << "," << fmt17(rec.H_avg[i]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << "," << fmt17(rec.sigma_avg(i, j));
    os << "," << fmt17(rec.J_avg) << "," << fmt17(rec.psi_avg) << "," << rec.newton_iters << "\n";
}

std::string vtk_step_path(const std::string& csv_path, int step) {
    std::string stem = csv_path;
    const auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%04d.vtk", step);
    return stem + buf;
}

void write_vtk_step(const RveProblem& problem, const Eigen::VectorXd& x, const Vec3& B_M,
                    const std::string& path) {
    const Mesh& mesh = problem.mesh();
    const DofMap& dofs = problem.dof_map();
    const Assembler& asmr = problem.assembler();

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "# vtk DataFile Version 3.0\nmmrve step output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& v : mesh.vertices) os << v[0] << " " << v[1] << " " << v[2] << "\n";
    os << "CELLS " << mesh.n_cells() << " " << 9 * mesh.n_cells() << "\n";
    for (const auto& c : mesh.cells) {
        os << "8";
        for (int v : c) os << " " << v;
        os << "\n";
    }
    os << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) os << "12\n";

    os << "POINT_DATA " << mesh.n_vertices() << "\n";
    os << "VECTORS u double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v)
        os << x[dofs.u_dof(v, 0)] << " " << x[dofs.u_dof(v, 1)] << " " << x[dofs.u_dof(v, 2)]
           << "\n";

    // per-cell sigma_zz (volume average over the cell's quadrature points)
    std::vector<double> sig_zz(mesh.n_cells(), 0.0);
    std::vector<double> wsum(mesh.n_cells(), 0.0);
    asmr.for_each_point(x, B_M,
                        [&](int cell, double w, const PointKinematics& pk, const PointStress& s,
                            double scell_over_ve) {
                            const double J = pk.F.determinant();
                            const Mat3 cof = J * pk.F.inverse().transpose();
                            const Mat3 sig = ((s.P + scell_over_ve * cof) * pk.F.transpose()) / J;
                            sig_zz[cell] += w * sig(2, 2);
                            wsum[cell] += w;
                        });

    os << "CELL_DATA " << mesh.n_cells() << "\n";
    os << "SCALARS phase int 1\nLOOKUP_TABLE default\n";
    for (Phase p : mesh.phase) os << (p == Phase::Particle ? 1 : 0) << "\n";
    os << "SCALARS sigma_zz double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < mesh.n_cells(); ++c) os << sig_zz[c] / wsum[c] << "\n";

    // |A| at the cell center (covariant-mapped edge interpolation)
    os << "SCALARS A_mag double 1\nLOOKUP_TABLE default\n";
    std::array<Vec3, 12> vecs, curls;
    nedelec_eval(Vec3::Zero(), vecs, curls);
    const Vec3 h = mesh.cell_size();
    const Mat3 JinvT = Mat3((0.5 * h).asDiagonal()).inverse().transpose();
    for (int c = 0; c < mesh.n_cells(); ++c) {
        Vec3 A = Vec3::Zero();
        for (int e = 0; e < 12; ++e)
            A += mesh.cell_edge_signs[c][e] * x[dofs.a_dof(mesh.cell_edges[c][e])] *
                 (JinvT * vecs[e]);
        os << A.norm() << "\n";
    }
}

} // namespace

int run_simulation(const RunConfig& config, std::ostream& log) {
    const Mesh mesh = build_rve_mesh(config.mesh.n, config.mesh.L, config.mesh.inclusions);
    TwoPhaseMaterial materials{config.matrix, config.particle};

    NewtonSettings settings = config.solver;
    settings.verbosity = config.output.verbosity;

    RveProblem problem(mesh, materials);
    if (config.output.dump_constraints) log << problem.constraints().dump();

    log << "mesh: " << mesh.n[0] << "x" << mesh.n[1] << "x" << mesh.n[2] << ", "
        << mesh.n_cells() << " cells, voxel volume fraction "
        << mesh.voxel_volume_fraction << " (analytic " << mesh.analytic_volume_fraction
        << ")\n";

    std::ofstream csv(config.output.csv);
    if (!csv) {
        log << "error: cannot open " << config.output.csv << "\n";
        return 1;
    }
    csv_header(csv, config);

    StepCallback on_step = [&](int step, const HomogenizedRecord& rec, const Eigen::VectorXd& x) {
        csv_row(csv, rec);
        csv.flush();
        if (config.output.vtk && step % config.output.vtk_stride == 0) {
            const auto [F_M, B_M] = loads_at(rec.t, config.load);
            (void)F_M;
            write_vtk_step(problem, x, B_M, vtk_step_path(config.output.csv, step));
        }
    };

    const RunResult result =
        run_path(problem, config.load, settings, config.output.verbosity > 0 ? &log : nullptr,
                 on_step);
    if (!result.completed) {
        log << "error: " << result.error << " (" << result.records.size()
            << " steps completed)\n";
        return 1;
    }
    log << "completed " << result.records.size() << " steps -> " << config.output.csv << "\n";
    return 0;
}

int run_oracle(const RunConfig& config, std::ostream& out) {
    for (int eta : {1, 0}) {
        const MaterialParams& p = config.particle;
        const SmallStrainCoefficients c = small_strain_coefficients(p, eta);
        out << (eta ? "particle (eta=1)" : "particle with magnetization off (eta=0)") << ":\n";
        out << "  chi_L      = " << fmt17(c.chi_L) << "\n";
        out << "  mu_eff     = " << fmt17(c.mu_eff) << " H/m\n";
        out << "  E          = " << fmt17(c.E_lin) << " Pa\n";
        out << "  Lambda_3333 = " << fmt17(c.Lambda[2][2][2][2]) << " 1/T^2\n";
        out << "  Lambda_1133 = " << fmt17(c.Lambda[0][0][2][2]) << " 1/T^2\n";
        out << "  Lambda_2233 = " << fmt17(c.Lambda[1][1][2][2]) << " 1/T^2\n";
    }
    return 0;
}

int run_check(std::ostream& out) {
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    MaterialParams matrix;
    matrix.K = 1.25e6;
    matrix.C1 = 1.2595e4;
    matrix.C2 = 7.0244e1;
    matrix.C3 = 9.8177;
    matrix.mu0 = 1.2564e-6;
    matrix.ms_leg = 8.41e5;
    matrix.alpha_leg = 2.18e-5;
    matrix.eta = 0;
    MaterialParams particle = matrix;
    particle.K = 2.5e8;
    particle.C1 = 1.0e7;
    particle.C2 = 0.0;
    particle.C3 = 0.0;
    particle.eta = 1;

    const Mesh mesh =
        build_rve_mesh({2, 2, 2}, Vec3::Ones(), {{Vec3(0.5, 0.5, 0.5), 0.3}});
    RveProblem problem(mesh, {matrix, particle});
    NewtonSettings settings;

    // patch test on a homogeneous variant
    {
        const Mesh homo = build_rve_mesh({2, 2, 2}, Vec3::Ones(), {});
        RveProblem hp(homo, {matrix, particle});
        Mat3 F_M;
        F_M << 1.05, 0.02, 0.0, 0.0, 0.97, 0.01, 0.0, 0.0, 1.01;
        const Vec3 B_M(0.05, -0.02, 0.1);
        Eigen::VectorXd y = hp.zero_reduced_state();
        const NewtonReport rep = hp.solve(F_M, B_M, y, settings);
        const Eigen::VectorXd x = hp.full_state(F_M, y);

        double worst_u = 0.0;
        const Mat3 G = F_M - Mat3::Identity();
        for (int v = 0; v < homo.n_vertices(); ++v) {
            const Vec3 affine = G * homo.vertices[v];
            for (int k = 0; k < 3; ++k)
                worst_u = std::max(worst_u,
                                   std::abs(x[hp.dof_map().u_dof(v, k)] - affine[k]));
        }
        double worst_a = 0.0;
        for (int e = 0; e < homo.n_edges(); ++e)
            worst_a = std::max(worst_a, std::abs(x[hp.dof_map().a_dof(e)]));
        report("patch test (affine F_M, uniform B_M)", rep.converged && worst_u < 1e-9 && worst_a < 1e-9);
    }

    // averaging identities on the heterogeneous mesh
    {
        Mat3 F_M;
        F_M << 1.02, 0.0, 0.0, 0.0, 0.99, 0.0, 0.0, 0.0, 1.0 / (1.02 * 0.99);
        const Vec3 B_M(0.0, 0.0, 0.1);
        Eigen::VectorXd y = problem.zero_reduced_state();
        const NewtonReport rep = problem.solve(F_M, B_M, y, settings);
        const Eigen::VectorXd x = problem.full_state(F_M, y);
        const HomogenizedRecord rec = average_all(problem.assembler(), x, B_M);
        const bool okF = (rec.F_avg - F_M).cwiseAbs().maxCoeff() < 1e-12;
        const bool okB = (rec.B_avg - B_M).cwiseAbs().maxCoeff() < 1e-12;
        report("averaging identities <F> = F_M, <B> = B_M", rep.converged && okF && okB);

        const double viol = max_constraint_violation(problem.constraints(), x);
        report("constraint residual <= 1e-12", viol < 1e-12 * (1.0 + x.cwiseAbs().maxCoeff()));

        // tangent vs directional finite differences of the condensed residual
        Assembler::Request req;
        req.tangent = true;
        const auto sys = problem.assembler().assemble(x, B_M, req);
        const auto Kr = condense_matrix(sys.K, problem.reduction());
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        Eigen::VectorXd dy(problem.reduction().n_reduced);
        for (int i = 0; i < dy.size(); ++i) dy[i] = unif(rng);
        dy *= 1e-7 / dy.norm();
        const Eigen::VectorXd s =
            problem.constraints().offset_vector_for(problem.dof_map().n_total(), F_M);
        auto rr = [&](const Eigen::VectorXd& yy) {
            return condense_residual(
                problem.assembler().residual(expand_state(problem.reduction(), yy, s), B_M),
                problem.reduction());
        };
        const Eigen::VectorXd fd = (rr(y + dy) - rr(y - dy)) / 2.0;
        const Eigen::VectorXd kd = Kr * dy;
        const double rel = (fd - kd).norm() / kd.norm();
        report("tangent matches FD of residual (1e-5)", rel < 1e-5);
    }

    out << (failures == 0 ? "all checks passed\n" : "CHECK FAILURES\n");
    return failures == 0 ? 0 : 1;
}

} // namespace mmrve
