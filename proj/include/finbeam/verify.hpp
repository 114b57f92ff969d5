#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "finbeam/assembly.hpp"
#include "finbeam/model.hpp"
#include "finbeam/solver.hpp"

namespace finbeam {

/**
 * @brief Small-deflection cantilever tip force for an imposed tip deflection.
 *
 * Returns 3*E*I*delta/L^3. Only valid in the linear regime; throws
 * std::domain_error when delta/L exceeds 2%.
 */
inline double cantilever_oracle(double e_mod, double inertia, double length, double delta_tip) {
    if (std::abs(delta_tip) / length > 0.02)
        throw std::domain_error("cantilever_oracle: deflection outside the linear regime");
    return 3.0 * e_mod * inertia * delta_tip / (length * length * length);
}

/**
 * @brief Central-difference check of the assembled tangent at a state.
 *
 * Differencing step per column: h * L_char for translations (L_char = mean
 * undeformed member chord) and h radians for rotations. Returns the worst
 * relative column discrepancy between the differenced internal force and
 * assemble_tangent.
 */
inline double fd_tangent_check(const StructureModel& model, const Eigen::VectorXd& u, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_tangent_check: h must be positive");
    double l_char = 0.0;
    for (const Member& m : model.members) l_char += chord_length0(model, m);
    l_char /= std::max<size_t>(1, model.members.size());

    const InternalForces base = assemble_internal(model, u);
    const Eigen::MatrixXd k = assemble_tangent(model, u, base.q_l);
    double worst = 0.0;
    Eigen::VectorXd probe = u;
    for (int j = 0; j < model.n_dofs(); ++j) {
        const double hj = (j % 3 == 2) ? h : h * l_char;
        probe[j] = u[j] + hj;
        const Eigen::VectorXd f_plus = assemble_internal(model, probe).f_int;
        probe[j] = u[j] - hj;
        const Eigen::VectorXd f_minus = assemble_internal(model, probe).f_int;
        probe[j] = u[j];
        const Eigen::VectorXd fd_col = (f_plus - f_minus) / (2.0 * hj);
        const double col_norm = k.col(j).norm();
        if (col_norm > 0.0) worst = std::max(worst, (fd_col - k.col(j)).norm() / col_norm);
    }
    return worst;
}

/// One controlled DOF of a round-trip comparison.
struct RoundTripEntry {
    int node = 0;
    DofKind dof = DofKind::X;
    double imposed = 0.0;    ///< displacement fed to displacement control [m]
    double recovered = 0.0;  ///< displacement the force-control comparator returns [m]
    double error_pct = 0.0;  ///< signed 100*(recovered - imposed)/|imposed|
    double force = 0.0;      ///< estimated contact force [N]
};

/**
 * @brief Result of one displacement -> force -> displacement cycle.
 *
 * na marks cells where the comparison is invalid: a solver failed, or the
 * force-control comparator converged onto a different equilibrium branch
 * (detected by whole-state divergence, which separates from valid cells by
 * several orders of magnitude). na cells keep whatever diagnostics exist but
 * are excluded from averages.
 */
struct RoundTripResult {
    bool na = false;
    std::string na_reason;
    std::vector<RoundTripEntry> entries;
    double state_divergence = 0.0;  ///< max |u_fc - u_dc| / max |u_dc|
    SolveResult forward;            ///< displacement-control solve
    SolveResult back;               ///< force-control comparator solve

    double avg_abs_error_pct() const {
        if (entries.empty()) return 0.0;
        double s = 0.0;
        for (const RoundTripEntry& e : entries) s += std::abs(e.error_pct);
        return s / entries.size();
    }
};

/**
 * @brief Run displacement control, re-apply the estimated forces through
 *        force control, and compare displacements at the controlled DOFs.
 *
 * This substitutes for an external FE benchmark: the comparator shares the
 * discretization, so a valid cell must agree tightly.
 */
inline RoundTripResult round_trip(const StructureModel& model, const DisplacementLoadCase& load,
                                  const SolverSettings& settings) {
    RoundTripResult out;
    out.forward = displacement_control(model, load, settings);
    if (!out.forward.converged) {
        out.na = true;
        out.na_reason = "displacement control did not converge (" + out.forward.failure + ")";
        return out;
    }
    Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(model.n_dofs());
    const std::vector<int> ctrl = load.controlled();
    for (int i : ctrl) f_ext[i] = out.forward.contact_forces[i];
    out.back = force_control(model, f_ext, settings);
    if (!out.back.converged) {
        out.na = true;
        out.na_reason = "force-control comparator did not converge (" + out.back.failure + ")";
        return out;
    }
    const double scale = out.forward.u.cwiseAbs().maxCoeff();
    if (scale > 0.0)
        out.state_divergence = (out.back.u - out.forward.u).cwiseAbs().maxCoeff() / scale;
    for (int i : ctrl) {
        RoundTripEntry e;
        e.node = i / 3;
        e.dof = static_cast<DofKind>(i % 3);
        e.imposed = load.d_total[i];
        e.recovered = out.back.u[i];
        e.error_pct = 100.0 * (e.recovered - e.imposed) / std::abs(e.imposed);
        e.force = out.forward.contact_forces[i];
        out.entries.push_back(e);
    }
    if (out.state_divergence > 0.01) {
        out.na = true;
        out.na_reason = "comparator branch divergence (force control reached a different "
                        "equilibrium branch; state divergence " +
                        std::to_string(out.state_divergence * 100.0) + "%)";
    }
    return out;
}

/**
 * @brief Aggregated error table over a grid of round-trip cells.
 *
 * Cells marked na are excluded from every average; averages use absolute
 * error values. `group` keys rows (a node or node tuple) and `level` keys
 * columns (a displacement magnitude tuple).
 */
struct ErrorReport {
    struct Cell {
        std::string group;
        std::string level;
        bool na = false;
        std::string na_reason;
        std::vector<double> errors_pct;  ///< signed, one per controlled DOF
        std::vector<double> forces;      ///< estimated contact forces [N]
        double avg_abs() const {
            if (errors_pct.empty()) return 0.0;
            double s = 0.0;
            for (double e : errors_pct) s += std::abs(e);
            return s / errors_pct.size();
        }
    };
    std::vector<Cell> cells;

    std::map<std::string, double> per_group() const { return averages(&Cell::group); }
    std::map<std::string, double> per_level() const { return averages(&Cell::level); }

    double overall() const {
        double s = 0.0;
        int n = 0;
        for (const Cell& c : cells) {
            if (c.na) continue;
            for (double e : c.errors_pct) {
                s += std::abs(e);
                ++n;
            }
        }
        return n ? s / n : 0.0;
    }

private:
    std::map<std::string, double> averages(std::string Cell::*key) const {
        std::map<std::string, double> sums;
        std::map<std::string, int> counts;
        for (const Cell& c : cells) {
            if (c.na) continue;
            for (double e : c.errors_pct) {
                sums[c.*key] += std::abs(e);
                counts[c.*key] += 1;
            }
        }
        std::map<std::string, double> out;
        for (auto& [k, v] : sums) out[k] = v / counts[k];
        return out;
    }
};

}  // namespace finbeam
