#include "mmrve/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace mmrve {

void ConstraintSet::add(AffineConstraint c) {
    if (finalized_) throw std::logic_error("ConstraintSet::add after finalize");
    constraints_.push_back(std::move(c));
}

void ConstraintSet::merge(const ConstraintSet& other) {
    if (finalized_) throw std::logic_error("ConstraintSet::merge after finalize");
    constraints_.insert(constraints_.end(), other.constraints_.begin(), other.constraints_.end());
}

namespace {

struct Resolved {
    std::vector<std::pair<int, double>> terms;
    double offset = 0.0;
    Vec3 shift = Vec3::Zero();
    int comp = -1;
};

void combine_terms(std::vector<std::pair<int, double>>& terms) {
    std::sort(terms.begin(), terms.end());
    std::vector<std::pair<int, double>> out;
    for (const auto& t : terms) {
        if (!out.empty() && out.back().first == t.first)
            out.back().second += t.second;
        else
            out.push_back(t);
    }
    std::erase_if(out, [](const auto& t) { return t.second == 0.0; });
    terms = std::move(out);
}

bool same_resolution(const Resolved& a, const Resolved& b) {
    if (a.terms != b.terms) return false;
    if (std::abs(a.offset - b.offset) > 1e-12 * (1.0 + std::abs(a.offset))) return false;
    if ((a.shift - b.shift).norm() > 1e-12) return false;
    return a.comp == b.comp;
}

class Resolver {
public:
    explicit Resolver(const std::vector<AffineConstraint>& raw) {
        for (size_t i = 0; i < raw.size(); ++i) raw_[raw[i].follower].push_back(static_cast<int>(i));
        raw_list_ = &raw;
    }

    const Resolved& resolve(int follower) {
        auto it = memo_.find(follower);
        if (it != memo_.end()) return it->second;
        if (on_stack_.count(follower)) {
            std::ostringstream os;
            os << "constraint cycle through DOF " << follower;
            throw ConstraintConflict(os.str());
        }
        on_stack_.insert(follower);

        const auto& entries = raw_.at(follower);
        Resolved result = resolve_one((*raw_list_)[entries[0]]);
        for (size_t k = 1; k < entries.size(); ++k) {
            const Resolved other = resolve_one((*raw_list_)[entries[k]]);
            if (!same_resolution(result, other)) {
                std::ostringstream os;
                os << "inconsistent chained constraints for DOF " << follower;
                throw ConstraintConflict(os.str());
            }
        }
        on_stack_.erase(follower);
        return memo_.emplace(follower, std::move(result)).first->second;
    }

    bool has(int dof) const { return raw_.count(dof) > 0; }

private:
    Resolved resolve_one(const AffineConstraint& c) {
        Resolved r;
        r.offset = c.offset;
        r.shift = c.lattice_shift;
        r.comp = c.comp;
        for (const auto& [leader, coeff] : c.terms) {
            if (has(leader)) {
                const Resolved& sub = resolve(leader);
                for (const auto& [l2, c2] : sub.terms) r.terms.emplace_back(l2, coeff * c2);
                r.offset += coeff * sub.offset;
                r.shift += coeff * sub.shift;
            } else {
                r.terms.emplace_back(leader, coeff);
            }
        }
        combine_terms(r.terms);
        return r;
    }

    const std::vector<AffineConstraint>* raw_list_ = nullptr;
    std::map<int, std::vector<int>> raw_;
    std::unordered_map<int, Resolved> memo_;
    std::set<int> on_stack_;
};

} // namespace

void ConstraintSet::finalize() {
    if (finalized_) return;
    Resolver resolver(constraints_);

    std::vector<AffineConstraint> finalized;
    std::map<int, int> seen;  // follower -> index, map for deterministic order
    for (const auto& c : constraints_) {
        if (seen.count(c.follower)) continue;
        const Resolved& r = resolver.resolve(c.follower);
        AffineConstraint out;
        out.follower = c.follower;
        out.terms = r.terms;
        out.offset = r.offset;
        out.lattice_shift = r.shift;
        out.comp = r.comp;
        seen[c.follower] = static_cast<int>(finalized.size());
        finalized.push_back(std::move(out));
    }
    // deterministic order by follower id
    std::sort(finalized.begin(), finalized.end(),
              [](const auto& a, const auto& b) { return a.follower < b.follower; });

    constraints_ = std::move(finalized);
    by_follower_.clear();
    for (size_t i = 0; i < constraints_.size(); ++i)
        by_follower_[constraints_[i].follower] = static_cast<int>(i);
    finalized_ = true;
}

const AffineConstraint* ConstraintSet::find(int dof) const {
    auto it = by_follower_.find(dof);
    return it == by_follower_.end() ? nullptr : &constraints_[it->second];
}

void ConstraintSet::update_offsets(const Mat3& F_M) {
    const Mat3 G = F_M - Mat3::Identity();
    for (auto& c : constraints_)
        if (c.comp >= 0) c.offset = (G * c.lattice_shift)[c.comp];
}

Eigen::VectorXd ConstraintSet::offset_vector(int n_dofs) const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n_dofs);
    for (const auto& c : constraints_) s[c.follower] = c.offset;
    return s;
}

Eigen::VectorXd ConstraintSet::offset_vector_for(int n_dofs, const Mat3& F_M) const {
    const Mat3 G = F_M - Mat3::Identity();
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n_dofs);
    for (const auto& c : constraints_)
        s[c.follower] = (c.comp >= 0) ? (G * c.lattice_shift)[c.comp] : c.offset;
    return s;
}

Eigen::VectorXd ConstraintSet::offset_direction(int n_dofs, const Mat3& dF_M) const {
    Eigen::VectorXd ds = Eigen::VectorXd::Zero(n_dofs);
    for (const auto& c : constraints_)
        if (c.comp >= 0) ds[c.follower] = (dF_M * c.lattice_shift)[c.comp];
    return ds;
}

std::string ConstraintSet::dump() const {
    std::ostringstream os;
    for (const auto& c : constraints_) {
        os << c.follower << " <-";
        for (const auto& [l, coeff] : c.terms) os << " " << coeff << "*[" << l << "]";
        os << " + " << c.offset << "\n";
    }
    return os.str();
}

ConstraintSet mechanical_periodicity(const FacePairing& pairing, const Mesh& mesh,
                                     const DofMap& dofs, const Mat3& F_M) {
    ConstraintSet set;
    const Mat3 G = F_M - Mat3::Identity();
    for (int axis = 0; axis < 3; ++axis) {
        Vec3 Lvec = Vec3::Zero();
        Lvec[axis] = mesh.L[axis];
        const Vec3 jump = G * Lvec;
        for (const auto& vp : pairing.vertex_pairs[axis]) {
            for (int k = 0; k < 3; ++k) {
                AffineConstraint c;
                c.follower = dofs.u_dof(vp.follower, k);
                c.terms = {{dofs.u_dof(vp.leader, k), 1.0}};
                c.offset = jump[k];
                c.lattice_shift = Lvec;
                c.comp = k;
                set.add(std::move(c));
            }
        }
    }
    return set;
}

ConstraintSet magnetic_periodicity(const FacePairing& pairing, const DofMap& dofs) {
    ConstraintSet set;
    for (int axis = 0; axis < 3; ++axis)
        for (const auto& ep : pairing.edge_pairs[axis]) {
            AffineConstraint c;
            c.follower = dofs.a_dof(ep.follower);
            c.terms = {{dofs.a_dof(ep.leader), double(ep.sign)}};
            set.add(std::move(c));
        }
    return set;
}

ConstraintSet anchor_and_gauge(const Mesh& mesh, const DofMap& dofs,
                               const ConstraintSet& periodic) {
    ConstraintSet set;

    // anchor: lowest vertex whose displacement DOFs are all leaders
    int anchor = -1;
    for (int v = 0; v < mesh.n_vertices() && anchor < 0; ++v) {
        bool free = true;
        for (int k = 0; k < 3; ++k)
            if (periodic.is_follower(dofs.u_dof(v, k))) free = false;
        if (free) anchor = v;
    }
    if (anchor < 0) throw ConstraintConflict("anchor_and_gauge: no leader vertex available");
    for (int k = 0; k < 3; ++k) {
        AffineConstraint c;
        c.follower = dofs.u_dof(anchor, k);
        set.add(std::move(c));
    }

    // gauge: spanning tree of the periodic vertex graph plus one winding edge
    // per axis, all circulations pinned to zero
    const int nx = mesh.n[0], ny = mesh.n[1], nz = mesh.n[2];
    std::vector<std::array<int, 2>> tree;
    for (int i = 0; i + 1 < nx; ++i)
        tree.push_back({mesh.vertex_id(i, 0, 0), mesh.vertex_id(i + 1, 0, 0)});
    tree.push_back({mesh.vertex_id(nx - 1, 0, 0), mesh.vertex_id(nx, 0, 0)});  // x wrap
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j)
            tree.push_back({mesh.vertex_id(i, j, 0), mesh.vertex_id(i, j + 1, 0)});
    tree.push_back({mesh.vertex_id(0, ny - 1, 0), mesh.vertex_id(0, ny, 0)});  // y wrap
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k + 1 < nz; ++k)
                tree.push_back({mesh.vertex_id(i, j, k), mesh.vertex_id(i, j, k + 1)});
    tree.push_back({mesh.vertex_id(0, 0, nz - 1), mesh.vertex_id(0, 0, nz)});  // z wrap

    for (const auto& [va, vb] : tree) {
        const int e = mesh.edge_id(va, vb);
        if (e < 0) throw ConstraintConflict("anchor_and_gauge: tree edge not found");
        const int dof = dofs.a_dof(e);
        if (periodic.is_follower(dof))
            throw ConstraintConflict("anchor_and_gauge: gauge edge is a follower");
        AffineConstraint c;
        c.follower = dof;
        set.add(std::move(c));
    }
    return set;
}

Reduction make_reduction(const ConstraintSet& constraints, int n_dofs) {
    if (!constraints.finalized())
        throw std::logic_error("make_reduction: constraints not finalized");

    Reduction red;
    red.n_full = n_dofs;
    red.reduced_of.assign(n_dofs, -1);
    for (int d = 0; d < n_dofs; ++d) {
        if (constraints.is_follower(d)) continue;
        red.reduced_of[d] = static_cast<int>(red.full_of.size());
        red.full_of.push_back(d);
    }
    red.n_reduced = static_cast<int>(red.full_of.size());

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n_dofs + 3 * constraints.size());
    for (int d = 0; d < n_dofs; ++d)
        if (red.reduced_of[d] >= 0) trips.emplace_back(d, red.reduced_of[d], 1.0);
    for (const auto& c : constraints.all())
        for (const auto& [leader, coeff] : c.terms) {
            const int col = red.reduced_of[leader];
            if (col < 0) throw ConstraintConflict("make_reduction: leader is itself a follower");
            trips.emplace_back(c.follower, col, coeff);
        }
    red.T.resize(n_dofs, red.n_reduced);
    red.T.setFromTriplets(trips.begin(), trips.end());
    return red;
}

Eigen::SparseMatrix<double> condense_matrix(const Eigen::SparseMatrix<double>& K,
                                            const Reduction& red) {
    Eigen::SparseMatrix<double> KT = K * red.T;
    return Eigen::SparseMatrix<double>(red.T.transpose() * KT);
}

Eigen::VectorXd condense_residual(const Eigen::VectorXd& R, const Reduction& red) {
    return red.T.transpose() * R;
}

Eigen::VectorXd expand_state(const Reduction& red, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& s) {
    return red.T * y + s;
}

Eigen::VectorXd reduce_state(const Reduction& red, const Eigen::VectorXd& x) {
    Eigen::VectorXd y(red.n_reduced);
    for (int c = 0; c < red.n_reduced; ++c) y[c] = x[red.full_of[c]];
    return y;
}

double max_constraint_violation(const ConstraintSet& constraints, const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (const auto& c : constraints.all()) {
        double v = x[c.follower] - c.offset;
        for (const auto& [l, coeff] : c.terms) v -= coeff * x[l];
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

} // namespace mmrve
