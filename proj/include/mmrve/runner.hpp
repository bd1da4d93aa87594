#pragma once

#include <iosfwd>

#include "mmrve/config.hpp"

namespace mmrve {

// Executes a configured run: builds the RVE problem, marches the load path,
// appends one CSV row per converged step (with a provenance comment block)
// and optionally writes a VTK series. Returns a process exit status.
int run_simulation(const RunConfig& config, std::ostream& log);

// Prints the small-strain coefficient table for the configured particle
// parameters (and the matrix-only variant).
int run_oracle(const RunConfig& config, std::ostream& out);

// Built-in invariant suite on a 2^3 single-inclusion mesh; prints one
// PASS/FAIL line per check.
int run_check(std::ostream& out);

} // namespace mmrve
