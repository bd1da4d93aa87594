#pragma once

#include <stdexcept>
#include <string>

namespace mmrve {

// Invalid deformation state (det F <= 0, Jbar <= 0, ...).
struct InvalidKinematicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An inner iteration (Langevin inversion, Newton, linear solve) failed to converge.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value produced while evaluating the energy or its derivatives.
struct EvaluationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid microstructure geometry (e.g. overlapping inclusions).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate or inverted cell detected during field evaluation; carries the cell id.
struct MeshError : std::runtime_error {
    MeshError(const std::string& what, int cell) : std::runtime_error(what), cell_id(cell) {}
    int cell_id = -1;
};

// Two chained affine constraints disagree on the resolved offset or coefficient.
struct ConstraintConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Singular condensed system; the message carries a null-mode hint.
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration parse or validation error. All semantic problems are collected
// into one message, one per line.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mmrve
