#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "mmrve/autodiff.hpp"
#include "mmrve/constraints.hpp"
#include "mmrve/fem.hpp"

namespace mmrve {

// Monolithic residual / tangent assembly over all cells. The tangent combines
// the pointwise AD blocks with the cell-local low-rank coupling introduced by
// the element-averaged Jacobian:
//
//   K_cell += sF g^T + g sF^T + (sum w S2) g g^T + (sum w S1) * Hgeo,
//
// where g = d(jbar)/d(u_cell) and Hgeo = d2(jbar)/d(u_cell)^2. Omitting these
// terms degrades Newton to linear convergence.
class Assembler {
public:
    Assembler(const Mesh& mesh, const DofMap& dofs, const TwoPhaseMaterial& materials,
              const QuadratureRule& rule = default_rule());

    struct Request {
        bool tangent = false;
        const Vec3* load_dir = nullptr;  // assemble dR/dB_M . dB as well
    };

    struct Result {
        double energy = 0.0;
        Eigen::VectorXd R;
        Eigen::SparseMatrix<double> K;  // only when requested
        Eigen::VectorXd load;           // only when requested
    };

    Result assemble(const Eigen::VectorXd& x, const Vec3& B_M, const Request& req) const;

    Eigen::VectorXd residual(const Eigen::VectorXd& x, const Vec3& B_M) const {
        return assemble(x, B_M, {}).R;
    }

    // Element-averaged Jacobian of one cell from the current state.
    double cell_jbar(const Eigen::VectorXd& x, int cell) const;

    // Visits every quadrature point with its kinematics, first derivatives and
    // the cell's jbar stress channel (S_cell / V_cell). Used for averaging.
    using PointVisitor = std::function<void(int cell, double wdet, const PointKinematics& pk,
                                            const PointStress& stress, double scell_over_ve)>;
    void for_each_point(const Eigen::VectorXd& x, const Vec3& B_M, const PointVisitor& visit) const;

    const Mesh& mesh() const { return mesh_; }
    const DofMap& dofs() const { return dofs_; }
    const CellBasis& basis() const { return basis_; }
    const TwoPhaseMaterial& materials() const { return materials_; }

    // Cell DOF gather: 24 displacement DOF ids, 12 edge DOF ids, edge signs.
    void cell_dofs(int cell, std::array<int, 24>& udofs, std::array<int, 12>& adofs,
                   std::array<double, 12>& signs) const;

private:
    const Mesh& mesh_;
    const DofMap& dofs_;
    TwoPhaseMaterial materials_;
    CellBasis basis_;
};

} // namespace mmrve
