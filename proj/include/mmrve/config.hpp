#pragma once

#include <string>

#include "mmrve/driver.hpp"

namespace mmrve {

struct MeshConfig {
    std::array<int, 3> n = {4, 4, 4};
    Vec3 L = Vec3::Ones();
    std::vector<Inclusion> inclusions;
};

struct OutputConfig {
    std::string csv = "out.csv";
    bool vtk = false;
    int vtk_stride = 1;
    int verbosity = 0;
    bool dump_constraints = false;
};

struct RunConfig {
    MeshConfig mesh;
    MaterialParams matrix;
    MaterialParams particle;
    LoadPath load;
    NewtonSettings solver;
    OutputConfig output;
};

// Sectioned key=value text ([mesh], [matrix], [particle], [load], [solver],
// [output]; '#' comments; 'inclusion = cx cy cz r' repeatable). Unknown keys
// are rejected with a nearest-key suggestion; all semantic problems are
// collected into one error. The exact grammar is documented in the README.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical full-precision rendering; parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

// FNV-1a hash of the canonical serialization, reported in CSV provenance.
std::uint64_t config_hash(const RunConfig& config);

} // namespace mmrve
