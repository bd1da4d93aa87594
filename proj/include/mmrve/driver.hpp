#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "mmrve/homogenization.hpp"

namespace mmrve {

// One fully wired periodic RVE problem: mesh, DOF map, pairing, constraints
// (periodicity + anchor + gauge) and the assembler. The elimination operator
// T is load-independent; only the constraint offsets move with F_M.
class RveProblem {
public:
    RveProblem(const Mesh& mesh, const TwoPhaseMaterial& materials,
               const QuadratureRule& rule = default_rule());

    NewtonReport solve(const Mat3& F_M, const Vec3& B_M, Eigen::VectorXd& y,
                       const NewtonSettings& settings, std::ostream* log = nullptr,
                       int step_id = 0) const;

    Eigen::VectorXd zero_reduced_state() const {
        return Eigen::VectorXd::Zero(reduction_.n_reduced);
    }
    Eigen::VectorXd full_state(const Mat3& F_M, const Eigen::VectorXd& y) const;

    const Mesh& mesh() const { return mesh_; }
    const DofMap& dof_map() const { return dofs_; }
    const Assembler& assembler() const { return *assembler_; }
    const ConstraintSet& constraints() const { return constraints_; }
    const Reduction& reduction() const { return reduction_; }

private:
    Mesh mesh_;
    DofMap dofs_;
    std::unique_ptr<Assembler> assembler_;
    ConstraintSet constraints_;
    Reduction reduction_;
};

enum class LoadKind {
    Mechanical,
    Magnetic,
    Combined,
    StressRelaxedMagnetic,
    UniaxialIsochoricPlusMagnetic,
};

struct LoadPath {
    LoadKind kind = LoadKind::Mechanical;
    Mat3 F_final = Mat3::Identity();
    Vec3 B_final = Vec3::Zero();
    int steps = 10;
    bool isochoric_zz = false;
    double uniaxial_stretch = 0.0;            // UniaxialIsochoricPlusMagnetic only
    std::vector<int> relaxed_components = {0, 1, 2, 3, 4, 5};  // Voigt xx,yy,zz,xy,xz,yz
    double stress_tol = 1e-3;                 // normalized stress tolerance
};

// Linear ramp F_M(t) = I + t (F_final - I) with the isochoric zz override,
// B_M(t) = t B_final. Mechanical paths carry zero induction; magnetic and
// stress-relaxed paths keep F_M = I.
std::pair<Mat3, Vec3> loads_at(double t, const LoadPath& path);

struct RunResult {
    std::vector<HomogenizedRecord> records;  // one per nominal step
    bool completed = true;
    std::string error;
};

// Called after every recorded step with the converged full state.
using StepCallback =
    std::function<void(int step, const HomogenizedRecord& rec, const Eigen::VectorXd& x)>;

RunResult run_path(const RveProblem& problem, const LoadPath& path,
                   const NewtonSettings& settings, std::ostream* log = nullptr,
                   const StepCallback& on_step = {});

// Adjusts the macroscopic deformation (symmetric stretch, 6 variables) until
// the selected homogenized Cauchy stress components vanish within
// tol * sigma_ref, sigma_ref = max(C1 of the matrix, running max |sigma|).
// The outer Jacobian is built from forward differences of full RVE solves.
struct StressRelaxResult {
    bool converged = false;
    int outer_iterations = 0;
    int newton_iterations = 0;  // accumulated inner iterations
    Mat3 F_M = Mat3::Identity();
};

StressRelaxResult stress_relaxed_step(const RveProblem& problem, const Vec3& B_M,
                                      const std::vector<int>& targets, double tol,
                                      Mat3& U, Eigen::VectorXd& y, double& sigma_ref,
                                      const NewtonSettings& settings,
                                      std::ostream* log = nullptr, int step_id = 0);

} // namespace mmrve
