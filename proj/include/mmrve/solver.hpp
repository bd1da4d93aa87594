#pragma once

#include <iosfwd>
#include <vector>

#include "mmrve/assembly.hpp"
#include "mmrve/constraints.hpp"

namespace mmrve {

enum class LinearBackend { Direct, Iterative };

struct NewtonSettings {
    double rtol = 1e-8;
    double atol = 1e-10;
    int max_iterations = 25;
    bool line_search = true;
    double ls_factor = 0.5;
    int ls_max_cuts = 8;
    LinearBackend backend = LinearBackend::Direct;
    int verbosity = 0;
    int max_step_halvings = 4;
};

// Sparse solve of the condensed system. Direct = sparse LU with one step of
// iterative refinement; Iterative = ILUT-preconditioned BiCGSTAB. Throws
// SingularSystemError with a gauge/anchor hint when the factorization breaks
// down or the residual stays large.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                             LinearBackend backend);

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_norms;  // includes the initial residual
};

// Newton iteration on the condensed unknowns y (x = T y + s). The state y is
// updated in place; on failure it holds the last accepted iterate.
NewtonReport newton_solve(const Assembler& assembler, const Reduction& red,
                          const Eigen::VectorXd& s, const Vec3& B_M, Eigen::VectorXd& y,
                          const NewtonSettings& settings, std::ostream* log = nullptr,
                          int step_id = 0);

} // namespace mmrve
