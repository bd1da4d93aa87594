#include "mmrve/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace mmrve {

namespace {

struct Line {
    int number;
    std::string section;
    std::string key;
    std::string value;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
    for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"mesh", {"n", "L", "inclusion"}},
    {"matrix", {"model", "bulk_modulus", "C1", "C2", "C3", "mu_nh", "kappa_nh", "mu0", "ms_leg", "alpha_leg", "eta"}},
    {"particle", {"model", "bulk_modulus", "C1", "C2", "C3", "mu_nh", "kappa_nh", "mu0", "ms_leg", "alpha_leg", "eta"}},
    {"load", {"kind", "F_final", "B_final", "steps", "isochoric_zz", "uniaxial_stretch",
              "relax_components", "stress_tol"}},
    {"solver", {"newton_rtol", "newton_atol", "max_iterations", "line_search", "linear_solver",
                "max_step_halvings"}},
    {"output", {"csv", "vtk", "vtk_stride", "verbosity"}},
};

std::string suggest(const std::string& section, const std::string& key) {
    auto it = kKnownKeys.find(section);
    if (it == kKnownKeys.end()) return "";
    std::string best;
    int best_d = 1000;
    for (const auto& k : it->second) {
        const int d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best_d <= 3 ? best : "";
}

class Collector {
public:
    void error(int line, const std::string& msg) {
        std::ostringstream os;
        if (line > 0) os << "line " << line << ": ";
        os << msg;
        errors_.push_back(os.str());
    }
    void raise_if_any() const {
        if (errors_.empty()) return;
        std::ostringstream os;
        os << "configuration errors:";
        for (const auto& e : errors_) os << "\n  " << e;
        throw ConfigError(os.str());
    }

private:
    std::vector<std::string> errors_;
};

std::vector<double> parse_numbers(const std::string& value, int expected, int line, Collector& errs) {
    std::istringstream is(value);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (expected >= 0 && static_cast<int>(out.size()) != expected) {
        std::ostringstream os;
        os << "expected " << expected << " numbers, got " << out.size();
        errs.error(line, os.str());
        out.assign(expected, 0.0);
    }
    return out;
}

double parse_double(const std::string& value, int line, Collector& errs) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (trim(value.substr(pos)).empty()) return v;
    } catch (...) {
    }
    errs.error(line, "not a number: '" + value + "'");
    return 0.0;
}

int parse_int(const std::string& value, int line, Collector& errs) {
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (trim(value.substr(pos)).empty()) return v;
    } catch (...) {
    }
    errs.error(line, "not an integer: '" + value + "'");
    return 0;
}

bool parse_bool(const std::string& value, int line, Collector& errs) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    errs.error(line, "not a boolean: '" + value + "'");
    return false;
}

void apply_material(MaterialParams& m, const Line& ln, Collector& errs) {
    const auto& k = ln.key;
    if (k == "model") {
        if (ln.value == "yeoh")
            m.model = MechModel::Yeoh;
        else if (ln.value == "neo_hookean_compressible")
            m.model = MechModel::NeoHookeanCompressible;
        else
            errs.error(ln.number, "unknown model '" + ln.value +
                                      "' (expected yeoh or neo_hookean_compressible)");
    } else if (k == "bulk_modulus") m.K = parse_double(ln.value, ln.number, errs);
    else if (k == "C1") m.C1 = parse_double(ln.value, ln.number, errs);
    else if (k == "C2") m.C2 = parse_double(ln.value, ln.number, errs);
    else if (k == "C3") m.C3 = parse_double(ln.value, ln.number, errs);
    else if (k == "mu_nh") m.mu_nh = parse_double(ln.value, ln.number, errs);
    else if (k == "kappa_nh") m.kappa_nh = parse_double(ln.value, ln.number, errs);
    else if (k == "mu0") m.mu0 = parse_double(ln.value, ln.number, errs);
    else if (k == "ms_leg") m.ms_leg = parse_double(ln.value, ln.number, errs);
    else if (k == "alpha_leg") m.alpha_leg = parse_double(ln.value, ln.number, errs);
    else if (k == "eta") m.eta = parse_int(ln.value, ln.number, errs);
}

const std::map<std::string, int> kStressComponents = {
    {"xx", 0}, {"yy", 1}, {"zz", 2}, {"xy", 3}, {"xz", 4}, {"yz", 5}};

} // namespace

RunConfig parse_config(const std::string& text) {
    Collector errs;
    std::vector<Line> lines;
    {
        std::istringstream is(text);
        std::string raw;
        std::string section;
        int number = 0;
        while (std::getline(is, raw)) {
            ++number;
            const auto hash = raw.find('#');
            std::string stripped = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (stripped.empty()) continue;
            if (stripped.front() == '[') {
                if (stripped.back() != ']') {
                    errs.error(number, "malformed section header");
                    continue;
                }
                section = trim(stripped.substr(1, stripped.size() - 2));
                if (!kKnownKeys.count(section)) errs.error(number, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                errs.error(number, "expected key = value");
                continue;
            }
            if (section.empty()) {
                errs.error(number, "key outside of any section");
                continue;
            }
            Line ln{number, section, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1))};
            lines.push_back(std::move(ln));
        }
    }

    RunConfig cfg;
    cfg.particle.eta = 1;

    for (const auto& ln : lines) {
        auto known = kKnownKeys.find(ln.section);
        if (known == kKnownKeys.end()) continue;  // already reported
        if (std::find(known->second.begin(), known->second.end(), ln.key) == known->second.end()) {
            std::string msg = "unknown key '" + ln.key + "' in [" + ln.section + "]";
            const std::string s = suggest(ln.section, ln.key);
            if (!s.empty()) msg += " (did you mean '" + s + "'?)";
            errs.error(ln.number, msg);
            continue;
        }

        if (ln.section == "mesh") {
            if (ln.key == "n") {
                const auto v = parse_numbers(ln.value, 3, ln.number, errs);
                for (int i = 0; i < 3; ++i) cfg.mesh.n[i] = static_cast<int>(v[i]);
            } else if (ln.key == "L") {
                const auto v = parse_numbers(ln.value, 3, ln.number, errs);
                for (int i = 0; i < 3; ++i) cfg.mesh.L[i] = v[i];
            } else if (ln.key == "inclusion") {
                const auto v = parse_numbers(ln.value, 4, ln.number, errs);
                cfg.mesh.inclusions.push_back({Vec3(v[0], v[1], v[2]), v[3]});
            }
        } else if (ln.section == "matrix") {
            apply_material(cfg.matrix, ln, errs);
        } else if (ln.section == "particle") {
            apply_material(cfg.particle, ln, errs);
        } else if (ln.section == "load") {
            if (ln.key == "kind") {
                static const std::map<std::string, LoadKind> kinds = {
                    {"mechanical", LoadKind::Mechanical},
                    {"magnetic", LoadKind::Magnetic},
                    {"combined", LoadKind::Combined},
                    {"stress_relaxed_magnetic", LoadKind::StressRelaxedMagnetic},
                    {"uniaxial_isochoric_plus_magnetic", LoadKind::UniaxialIsochoricPlusMagnetic}};
                auto it = kinds.find(ln.value);
                if (it == kinds.end())
                    errs.error(ln.number, "unknown load kind '" + ln.value + "'");
                else
                    cfg.load.kind = it->second;
            } else if (ln.key == "F_final") {
                const auto v = parse_numbers(ln.value, 9, ln.number, errs);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) cfg.load.F_final(i, j) = v[3 * i + j];
            } else if (ln.key == "B_final") {
                const auto v = parse_numbers(ln.value, 3, ln.number, errs);
                cfg.load.B_final = Vec3(v[0], v[1], v[2]);
            } else if (ln.key == "steps") {
                cfg.load.steps = parse_int(ln.value, ln.number, errs);
            } else if (ln.key == "isochoric_zz") {
                cfg.load.isochoric_zz = parse_bool(ln.value, ln.number, errs);
            } else if (ln.key == "uniaxial_stretch") {
                cfg.load.uniaxial_stretch = parse_double(ln.value, ln.number, errs);
            } else if (ln.key == "stress_tol") {
                cfg.load.stress_tol = parse_double(ln.value, ln.number, errs);
            } else if (ln.key == "relax_components") {
                cfg.load.relaxed_components.clear();
                if (ln.value == "all") {
                    cfg.load.relaxed_components = {0, 1, 2, 3, 4, 5};
                } else {
                    std::istringstream is(ln.value);
                    std::string tok;
                    while (is >> tok) {
                        auto it = kStressComponents.find(tok);
                        if (it == kStressComponents.end())
                            errs.error(ln.number, "unknown stress component '" + tok + "'");
                        else
                            cfg.load.relaxed_components.push_back(it->second);
                    }
                }
            }
        } else if (ln.section == "solver") {
            if (ln.key == "newton_rtol") cfg.solver.rtol = parse_double(ln.value, ln.number, errs);
            else if (ln.key == "newton_atol") cfg.solver.atol = parse_double(ln.value, ln.number, errs);
            else if (ln.key == "max_iterations") cfg.solver.max_iterations = parse_int(ln.value, ln.number, errs);
            else if (ln.key == "line_search") cfg.solver.line_search = parse_bool(ln.value, ln.number, errs);
            else if (ln.key == "max_step_halvings") cfg.solver.max_step_halvings = parse_int(ln.value, ln.number, errs);
            else if (ln.key == "linear_solver") {
                if (ln.value == "direct") cfg.solver.backend = LinearBackend::Direct;
                else if (ln.value == "iterative") cfg.solver.backend = LinearBackend::Iterative;
                else errs.error(ln.number, "linear_solver must be direct or iterative");
            }
        } else if (ln.section == "output") {
            if (ln.key == "csv") cfg.output.csv = ln.value;
            else if (ln.key == "vtk") cfg.output.vtk = parse_bool(ln.value, ln.number, errs);
            else if (ln.key == "vtk_stride") cfg.output.vtk_stride = parse_int(ln.value, ln.number, errs);
            else if (ln.key == "verbosity") cfg.output.verbosity = parse_int(ln.value, ln.number, errs);
        }
    }

    // derived load shapes
    if (cfg.load.kind == LoadKind::UniaxialIsochoricPlusMagnetic) {
        const double sx = 1.0 + cfg.load.uniaxial_stretch;
        if (sx > 0.0) {
            const double st = 1.0 / std::sqrt(sx);
            cfg.load.F_final = Vec3(sx, st, st).asDiagonal();
            cfg.load.isochoric_zz = true;
        } else {
            errs.error(0, "uniaxial_stretch must be > -1");
        }
    }

    // semantic validation, collected
    for (int i = 0; i < 3; ++i) {
        if (cfg.mesh.n[i] < 2) errs.error(0, "[mesh] n must be >= 2 per axis");
        if (!(cfg.mesh.L[i] > 0.0)) errs.error(0, "[mesh] L must be positive");
    }
    for (size_t i = 0; i < cfg.mesh.inclusions.size(); ++i)
        if (!(cfg.mesh.inclusions[i].radius > 0.0)) {
            std::ostringstream os;
            os << "[mesh] inclusion " << i << " has non-positive radius";
            errs.error(0, os.str());
        }
    for (const auto& msg : cfg.matrix.validate()) errs.error(0, "[matrix] " + msg);
    for (const auto& msg : cfg.particle.validate()) errs.error(0, "[particle] " + msg);
    if (cfg.load.steps < 1) errs.error(0, "[load] steps must be >= 1");
    if (cfg.load.kind == LoadKind::StressRelaxedMagnetic && !(cfg.load.stress_tol > 0.0))
        errs.error(0, "[load] stress_tol must be > 0");
    if (!(cfg.solver.rtol > 0.0) || !(cfg.solver.atol > 0.0))
        errs.error(0, "[solver] tolerances must be > 0");
    if (cfg.output.vtk_stride < 1) errs.error(0, "[output] vtk_stride must be >= 1");

    errs.raise_if_any();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void serialize_material(std::ostringstream& os, const char* name, const MaterialParams& m) {
    os << "[" << name << "]\n";
    os << "model = " << (m.model == MechModel::Yeoh ? "yeoh" : "neo_hookean_compressible") << "\n";
    if (m.model == MechModel::Yeoh) {
        os << "bulk_modulus = " << fmt(m.K) << "\n";
        os << "C1 = " << fmt(m.C1) << "\n";
        os << "C2 = " << fmt(m.C2) << "\n";
        os << "C3 = " << fmt(m.C3) << "\n";
    } else {
        os << "mu_nh = " << fmt(m.mu_nh) << "\n";
        os << "kappa_nh = " << fmt(m.kappa_nh) << "\n";
    }
    os << "mu0 = " << fmt(m.mu0) << "\n";
    os << "ms_leg = " << fmt(m.ms_leg) << "\n";
    os << "alpha_leg = " << fmt(m.alpha_leg) << "\n";
    os << "eta = " << m.eta << "\n\n";
}

} // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[mesh]\n";
    os << "n = " << c.mesh.n[0] << " " << c.mesh.n[1] << " " << c.mesh.n[2] << "\n";
    os << "L = " << fmt(c.mesh.L[0]) << " " << fmt(c.mesh.L[1]) << " " << fmt(c.mesh.L[2]) << "\n";
    for (const auto& inc : c.mesh.inclusions)
        os << "inclusion = " << fmt(inc.center[0]) << " " << fmt(inc.center[1]) << " "
           << fmt(inc.center[2]) << " " << fmt(inc.radius) << "\n";
    os << "\n";
    serialize_material(os, "matrix", c.matrix);
    serialize_material(os, "particle", c.particle);

    os << "[load]\n";
    const char* kind = nullptr;
    switch (c.load.kind) {
        case LoadKind::Mechanical: kind = "mechanical"; break;
        case LoadKind::Magnetic: kind = "magnetic"; break;
        case LoadKind::Combined: kind = "combined"; break;
        case LoadKind::StressRelaxedMagnetic: kind = "stress_relaxed_magnetic"; break;
        case LoadKind::UniaxialIsochoricPlusMagnetic: kind = "uniaxial_isochoric_plus_magnetic"; break;
    }
    os << "kind = " << kind << "\n";
    os << "F_final =";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << " " << fmt(c.load.F_final(i, j));
    os << "\n";
    os << "B_final = " << fmt(c.load.B_final[0]) << " " << fmt(c.load.B_final[1]) << " "
       << fmt(c.load.B_final[2]) << "\n";
    os << "steps = " << c.load.steps << "\n";
    os << "isochoric_zz = " << (c.load.isochoric_zz ? "true" : "false") << "\n";
    if (c.load.kind == LoadKind::UniaxialIsochoricPlusMagnetic)
        os << "uniaxial_stretch = " << fmt(c.load.uniaxial_stretch) << "\n";
    os << "relax_components =";
    static const char* names[6] = {"xx", "yy", "zz", "xy", "xz", "yz"};
    for (int idx : c.load.relaxed_components) os << " " << names[idx];
    os << "\n";
    os << "stress_tol = " << fmt(c.load.stress_tol) << "\n\n";

    os << "[solver]\n";
    os << "newton_rtol = " << fmt(c.solver.rtol) << "\n";
    os << "newton_atol = " << fmt(c.solver.atol) << "\n";
    os << "max_iterations = " << c.solver.max_iterations << "\n";
    os << "line_search = " << (c.solver.line_search ? "true" : "false") << "\n";
    os << "max_step_halvings = " << c.solver.max_step_halvings << "\n";
    os << "linear_solver = "
       << (c.solver.backend == LinearBackend::Direct ? "direct" : "iterative") << "\n\n";

    os << "[output]\n";
    os << "csv = " << c.output.csv << "\n";
    os << "vtk = " << (c.output.vtk ? "true" : "false") << "\n";
    os << "vtk_stride = " << c.output.vtk_stride << "\n";
    os << "verbosity = " << c.output.verbosity << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string s = serialize_config(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace mmrve
