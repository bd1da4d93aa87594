#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmrve/fem.hpp"
#include "mmrve/mesh.hpp"

namespace mmrve {

// follower = sum(coeff * leader) + offset. Mechanical periodicity constraints
// carry their accumulated lattice shift so offsets can be re-evaluated for a
// new macroscopic deformation gradient without re-chaining.
struct AffineConstraint {
    int follower = -1;
    std::vector<std::pair<int, double>> terms;
    double offset = 0.0;

    Vec3 lattice_shift = Vec3::Zero();  // offset = ((F_M - I) * lattice_shift)[comp]
    int comp = -1;                      // displacement component, -1 for non-mechanical
};

class ConstraintSet {
public:
    // Raw constraints may target the same follower through different axes;
    // finalize() chains them to ultimate leaders and verifies they agree.
    void add(AffineConstraint c);
    void merge(const ConstraintSet& other);
    void finalize();

    bool finalized() const { return finalized_; }
    bool is_follower(int dof) const { return by_follower_.count(dof) > 0; }
    const AffineConstraint* find(int dof) const;
    const std::vector<AffineConstraint>& all() const { return constraints_; }
    std::size_t size() const { return constraints_.size(); }

    // Recompute mechanical offsets for a new macroscopic deformation gradient.
    void update_offsets(const Mat3& F_M);

    // Offset vector s over all DOFs, and its directional derivative in F_M.
    Eigen::VectorXd offset_vector(int n_dofs) const;
    Eigen::VectorXd offset_vector_for(int n_dofs, const Mat3& F_M) const;
    Eigen::VectorXd offset_direction(int n_dofs, const Mat3& dF_M) const;

    // Text dump (follower <- terms, offset), for diagnostics.
    std::string dump() const;

private:
    std::vector<AffineConstraint> constraints_;
    std::unordered_map<int, int> by_follower_;
    bool finalized_ = false;
};

// Periodicity of the displacement field with the affine macroscopic jump
// (F_M - I) L_i across each face pair, chained through shared corners/edges.
ConstraintSet mechanical_periodicity(const FacePairing& pairing, const Mesh& mesh,
                                     const DofMap& dofs, const Mat3& F_M);

// Periodicity of the edge circulations, a+ = sign * a-.
ConstraintSet magnetic_periodicity(const FacePairing& pairing, const DofMap& dofs);

// Rigid-translation anchor (three displacement components of the lowest
// eligible leader vertex) plus the gauge constraints that make the vector
// potential unique: circulations on a deterministic spanning tree of the
// periodic vertex graph and on one wrap-around edge per axis are set to zero.
// Fixing a single edge DOF is not sufficient -- discrete gradient fields are
// exactly representable in the lowest-order edge space, so the curl operator
// has a null space of dimension (#periodic vertices + 2) that must be pinned
// entirely.
ConstraintSet anchor_and_gauge(const Mesh& mesh, const DofMap& dofs,
                               const ConstraintSet& periodic);

// Elimination operator: x = T y + s with y the free DOFs.
struct Reduction {
    Eigen::SparseMatrix<double> T;  // n_full x n_reduced
    std::vector<int> reduced_of;    // full dof -> column, -1 for followers
    std::vector<int> full_of;       // column -> full dof
    int n_full = 0;
    int n_reduced = 0;
};

Reduction make_reduction(const ConstraintSet& constraints, int n_dofs);

Eigen::SparseMatrix<double> condense_matrix(const Eigen::SparseMatrix<double>& K,
                                            const Reduction& red);
Eigen::VectorXd condense_residual(const Eigen::VectorXd& R, const Reduction& red);
Eigen::VectorXd expand_state(const Reduction& red, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& s);
Eigen::VectorXd reduce_state(const Reduction& red, const Eigen::VectorXd& x);

// Max constraint violation |follower - sum(c*leader) - offset| of a full state.
double max_constraint_violation(const ConstraintSet& constraints, const Eigen::VectorXd& x);

} // namespace mmrve
