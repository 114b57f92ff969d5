#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace finbeam {

/// Per-node degree of freedom: x-translation, y-translation, rotation.
enum class DofKind { X = 0, Y = 1, Rot = 2 };

inline const char* dof_kind_name(DofKind k) {
    switch (k) {
        case DofKind::X: return "x";
        case DofKind::Y: return "y";
        default: return "rot";
    }
}

struct Node {
    int id = 0;
    double x0 = 0.0;  ///< initial x [m]
    double y0 = 0.0;  ///< initial y [m]
};

/**
 * @brief One beam member between two nodes.
 *
 * L0_eff is the elastic length after the rigid-connection correction
 * L0_eff = |chord| - 2*rm with rm = mu * R_node; rm is kept so the same
 * correction can be applied to the deformed chord.
 */
struct Member {
    int id = 0;
    int node_i = 0;
    int node_j = 0;
    double E = 0.0;       ///< Young's modulus [Pa]
    double A = 0.0;       ///< cross-section area [m^2]
    double I = 0.0;       ///< second moment of area [m^4]
    double L0_eff = 0.0;  ///< effective initial length [m]
    double beta0 = 0.0;   ///< initial inclination [rad]
    double rm = 0.0;      ///< rigid node radius correction R_m [m]
};

/// Convergence controls shared by both nonlinear solvers.
struct SolverSettings {
    double tolerance = 1e-3;  ///< residual-norm threshold [N]
    int maxiter = 100;        ///< max corrector iterations per increment
    int n_inc = 100;          ///< number of increments
};

/**
 * @brief Immutable assembled structure: nodes, members, fixed DOFs.
 *
 * Global DOF ordering is node-major: (ux, uy, theta) per node, so DOF
 * 3*n+k belongs to node n. `constraints` holds fully fixed DOF indices,
 * sorted and unique. The model is safe to share across concurrent solves.
 */
struct StructureModel {
    std::vector<Node> nodes;
    std::vector<Member> members;
    std::vector<int> constraints;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_members() const { return static_cast<int>(members.size()); }
    int n_dofs() const { return 3 * n_nodes(); }

    /// Global index of a node's DOF; throws std::out_of_range for bad ids.
    int dof_index(int node_id, DofKind kind) const {
        if (node_id < 0 || node_id >= n_nodes())
            throw std::out_of_range("dof_index: node id " + std::to_string(node_id) +
                                    " out of range [0, " + std::to_string(n_nodes()) + ")");
        return 3 * node_id + static_cast<int>(kind);
    }

    bool is_fixed(int dof) const {
        return std::binary_search(constraints.begin(), constraints.end(), dof);
    }
};

/// Raw chord length of a member in the undeformed configuration.
inline double chord_length0(const StructureModel& model, const Member& m) {
    const Node& a = model.nodes[m.node_i];
    const Node& b = model.nodes[m.node_j];
    return std::hypot(b.x0 - a.x0, b.y0 - a.y0);
}

/**
 * @brief Build a member from node coordinates.
 *
 * Computes L0_eff = chord - 2*rm and beta0 from the node positions.
 * Throws std::domain_error when the correction consumes the member.
 */
inline Member make_member(const std::vector<Node>& nodes, int id, int node_i, int node_j,
                          double E, double A, double I, double rm = 0.0) {
    if (node_i < 0 || node_j < 0 || node_i >= static_cast<int>(nodes.size()) ||
        node_j >= static_cast<int>(nodes.size()))
        throw std::out_of_range("make_member: node reference out of range");
    const Node& a = nodes[node_i];
    const Node& b = nodes[node_j];
    const double dx = b.x0 - a.x0;
    const double dy = b.y0 - a.y0;
    const double chord = std::hypot(dx, dy);
    Member m;
    m.id = id;
    m.node_i = node_i;
    m.node_j = node_j;
    m.E = E;
    m.A = A;
    m.I = I;
    m.rm = rm;
    m.L0_eff = chord - 2.0 * rm;
    m.beta0 = std::atan2(dy, dx);
    if (!(m.L0_eff > 0.0))
        throw std::domain_error("member " + std::to_string(id) +
                                " fully absorbed by node radius (chord " + std::to_string(chord) +
                                " m, 2*R_m " + std::to_string(2.0 * rm) + " m)");
    return m;
}

/**
 * @brief Check every structural invariant; returns the violated ones.
 *
 * An empty list means the model is well formed. Defects are data, not
 * failures: callers decide whether to proceed.
 */
inline std::vector<std::string> validate(const StructureModel& model) {
    std::vector<std::string> defects;
    const int nn = model.n_nodes();
    for (int k = 0; k < nn; ++k) {
        const Node& nd = model.nodes[k];
        if (nd.id != k)
            defects.push_back("node ids not contiguous at position " + std::to_string(k));
        if (!std::isfinite(nd.x0) || !std::isfinite(nd.y0))
            defects.push_back("node " + std::to_string(k) + " has non-finite coordinates");
    }
    for (const Member& m : model.members) {
        const std::string tag = "member " + std::to_string(m.id);
        if (m.node_i < 0 || m.node_i >= nn || m.node_j < 0 || m.node_j >= nn) {
            defects.push_back(tag + " references a missing node");
            continue;
        }
        if (m.node_i == m.node_j) defects.push_back(tag + ": degenerate member (node_i == node_j)");
        if (!(m.E > 0.0)) defects.push_back(tag + ": E must be positive");
        if (!(m.A > 0.0)) defects.push_back(tag + ": A must be positive");
        if (!(m.I > 0.0)) defects.push_back(tag + ": I must be positive");
        if (!(m.L0_eff > 0.0)) defects.push_back(tag + ": L0_eff must be positive");
        else if (m.node_i != m.node_j && m.L0_eff > chord_length0(model, m) + 1e-12)
            defects.push_back(tag + ": L0_eff exceeds raw chord length");
    }
    for (size_t k = 0; k < model.constraints.size(); ++k) {
        const int d = model.constraints[k];
        if (d < 0 || d >= model.n_dofs())
            defects.push_back("constraint dof " + std::to_string(d) + " out of range");
        if (k > 0 && model.constraints[k] <= model.constraints[k - 1])
            defects.push_back("constraints not sorted/unique at position " + std::to_string(k));
    }
    if (model.constraints.empty()) {
        defects.push_back("unconstrained structure (rigid-body modes)");
    } else if (static_cast<int>(model.constraints.size()) < 3 && nn > 0) {
        defects.push_back("fewer than 3 constrained dofs (rigid-body modes)");
    }

    // every node must be connected, through members, to a node carrying a constraint
    if (nn > 0 && !model.constraints.empty()) {
        std::vector<char> reached(nn, 0);
        std::vector<int> stack;
        for (int d : model.constraints) {
            if (d < 0 || d >= model.n_dofs()) continue;
            const int node = d / 3;
            if (!reached[node]) {
                reached[node] = 1;
                stack.push_back(node);
            }
        }
        std::vector<std::vector<int>> adj(nn);
        for (const Member& m : model.members) {
            if (m.node_i < 0 || m.node_i >= nn || m.node_j < 0 || m.node_j >= nn) continue;
            adj[m.node_i].push_back(m.node_j);
            adj[m.node_j].push_back(m.node_i);
        }
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            for (int other : adj[n]) {
                if (!reached[other]) {
                    reached[other] = 1;
                    stack.push_back(other);
                }
            }
        }
        for (int k = 0; k < nn; ++k)
            if (!reached[k])
                defects.push_back("node " + std::to_string(k) +
                                  " is not connected to any constrained node");
    }
    return defects;
}

}  // namespace finbeam
