#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "finbeam/assembly.hpp"
#include "finbeam/model.hpp"

namespace finbeam {

/**
 * @brief Prescribed-displacement load case.
 *
 * d_total holds the target displacements, nonzero only at controlled DOFs;
 * f_ref is the reference force vector, nonzero only at the same DOFs and with
 * matching signs. The controlled set is derived from the nonzero pattern of
 * d_total.
 */
struct DisplacementLoadCase {
    Eigen::VectorXd d_total;
    Eigen::VectorXd f_ref;

    std::vector<int> controlled() const {
        std::vector<int> idx;
        for (int i = 0; i < d_total.size(); ++i)
            if (d_total[i] != 0.0) idx.push_back(i);
        return idx;
    }
};

/// Convergence record of one increment.
struct IncrementRecord {
    int increment = 0;   ///< 1-based
    int iterations = 0;  ///< corrector iterations used
    double rho = 0.0;    ///< final residual norm [N]
};

/**
 * @brief Outcome of a nonlinear solve.
 *
 * When converged is false, u/lambda/f_int hold the state of the last
 * converged increment and `failure` names the reason; the trace still
 * includes the failed increment.
 */
struct SolveResult {
    Eigen::VectorXd u;
    Eigen::VectorXd lambda;          ///< load ratios, nonzero only at controlled DOFs
    Eigen::VectorXd contact_forces;  ///< lambda .* f_ref, nonzero only at controlled DOFs
    Eigen::VectorXd f_int;           ///< internal forces at the returned state
    std::vector<IncrementRecord> trace;
    bool converged = false;
    std::string failure;
};

/// Case-invariant violations (empty result means the case is usable).
inline std::vector<std::string> validate_case(const StructureModel& model,
                                              const DisplacementLoadCase& load) {
    std::vector<std::string> defects;
    if (load.d_total.size() != model.n_dofs() || load.f_ref.size() != model.n_dofs())
        defects.push_back("load case vectors do not match the model DOF count");
    else {
        for (int i : load.controlled()) {
            if (model.is_fixed(i))
                defects.push_back("controlled dof " + std::to_string(i) + " is constrained");
            if (load.f_ref[i] == 0.0)
                defects.push_back("f_ref is zero at controlled dof " + std::to_string(i));
            else if (load.f_ref[i] * load.d_total[i] < 0.0)
                defects.push_back("f_ref sign differs from d_total at dof " + std::to_string(i));
        }
        for (int i = 0; i < load.f_ref.size(); ++i)
            if (load.f_ref[i] != 0.0 && load.d_total[i] == 0.0)
                defects.push_back("f_ref nonzero at uncontrolled dof " + std::to_string(i));
    }
    return defects;
}

/**
 * @brief Reference force with the direction of d_total and auto-scaled magnitude.
 *
 * Direction follows sign(d_total). Unless f0 > 0 overrides it, the magnitude is
 * chosen so that the linear predictor u_hat = K_s(0)^{-1} f_ref reaches
 * max |d_total| at the controlled DOFs, which keeps the load-ratio numbers
 * near unity.
 */
inline Eigen::VectorXd auto_reference_force(const StructureModel& model,
                                            const Eigen::VectorXd& d_total, double f0 = 0.0) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(model.n_dofs());
    std::vector<int> ctrl;
    for (int i = 0; i < d_total.size(); ++i)
        if (d_total[i] != 0.0) {
            dir[i] = d_total[i] > 0.0 ? 1.0 : -1.0;
            ctrl.push_back(i);
        }
    if (ctrl.empty()) return dir;
    if (f0 > 0.0) return dir * f0;
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(model.n_dofs());
    std::vector<LocalForces> q0(model.members.size());
    Eigen::MatrixXd k_s = assemble_tangent(model, u0, q0);
    apply_constraints_in_place(k_s, model.constraints);
    const Eigen::VectorXd u_hat = solve_linear(k_s, dir);
    double d_max = 0.0, u_max = 0.0;
    for (int i : ctrl) {
        d_max = std::max(d_max, std::abs(d_total[i]));
        u_max = std::max(u_max, std::abs(u_hat[i]));
    }
    if (!(u_max > 0.0))
        throw std::invalid_argument("auto_reference_force: controlled DOFs do not respond");
    return dir * (d_max / u_max);
}

namespace detail {

inline void zero_fixed(Eigen::VectorXd& v, const std::vector<int>& fixed) {
    for (int d : fixed) v[d] = 0.0;
}

/**
 * Controlled-block influence matrix: S(a,b) = [K_s^{-1} (f_ref_b e_b)]_a over
 * the controlled DOFs. Solving S x = rhs distributes the load-ratio updates so
 * the controlled displacements hit their targets exactly; with one controlled
 * DOF it degenerates to the scalar division u_f / u_hat of classic
 * displacement control.
 */
inline Eigen::MatrixXd control_influence(const TangentFactorization& fact,
                                         const Eigen::VectorXd& f_ref,
                                         const std::vector<int>& ctrl, int n_dofs) {
    const int k = static_cast<int>(ctrl.size());
    Eigen::MatrixXd s(k, k);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_dofs);
    for (int b = 0; b < k; ++b) {
        e[ctrl[b]] = f_ref[ctrl[b]];
        const Eigen::VectorXd col = fact.solve(e);
        e[ctrl[b]] = 0.0;
        for (int a = 0; a < k; ++a) s(a, b) = col[ctrl[a]];
    }
    return s;
}

/// Solve the small control system; ok=false flags an insensitive control set.
inline Eigen::VectorXd solve_control(const Eigen::MatrixXd& s, const Eigen::VectorXd& rhs,
                                     bool& ok) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
    const double max_entry = s.cwiseAbs().maxCoeff();
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    ok = (min_pivot > 1e-14 * max_entry);
    if (!ok) return Eigen::VectorXd::Zero(rhs.size());
    return lu.solve(rhs);
}

}  // namespace detail

/**
 * @brief Displacement control: impose d_total in n_inc increments and recover
 *        the forces that produce it.
 *
 * Per increment, with K_s from the previous converged state:
 *   - predictor: u_hat = K_s^{-1} f_ref, load-ratio increment dl from the
 *     controlled-block solve so du = K_s^{-1}(dl .* f_ref) advances every
 *     controlled DOF by exactly d_total / n_inc; lambda += dl.
 *   - residual R = lambda .* f_ref - F_int, zeroed at fixed DOFs.
 *   - corrector: refactor K_s at the trial state, u' = K_s^{-1} R,
 *     ratio from the control solve, dlambda -= ratio,
 *     du_corr = K_s^{-1}(R - ratio .* f_ref); repeat until |R| <= tolerance
 *     or maxiter is hit.
 *
 * A failed increment stops the run: the result carries the last converged
 * state with converged=false. The estimated contact force at each controlled
 * DOF is lambda_i * f_ref_i at the final state.
 */
inline SolveResult displacement_control(const StructureModel& model,
                                        const DisplacementLoadCase& load,
                                        const SolverSettings& settings) {
    {
        const auto model_defects = validate(model);
        if (!model_defects.empty())
            throw std::invalid_argument("displacement_control: invalid model: " +
                                        model_defects.front());
        const auto case_defects = validate_case(model, load);
        if (!case_defects.empty())
            throw std::invalid_argument("displacement_control: invalid load case: " +
                                        case_defects.front());
        if (!(settings.tolerance > 0.0) || settings.maxiter < 1 || settings.n_inc < 1)
            throw std::invalid_argument("displacement_control: invalid solver settings");
    }
    const int n = model.n_dofs();
    const std::vector<int> ctrl = load.controlled();
    const int nc = static_cast<int>(ctrl.size());

    SolveResult res;
    res.u = Eigen::VectorXd::Zero(n);
    res.lambda = Eigen::VectorXd::Zero(n);
    std::vector<LocalForces> q_l(model.members.size());
    res.f_int = Eigen::VectorXd::Zero(n);
    res.trace.reserve(settings.n_inc);

    Eigen::VectorXd du_bar_c(nc);
    for (int a = 0; a < nc; ++a) du_bar_c[a] = load.d_total[ctrl[a]] / settings.n_inc;

    for (int inc = 1; inc <= settings.n_inc; ++inc) {
        const Eigen::VectorXd u_prev = res.u;
        const Eigen::VectorXd lambda_prev = res.lambda;
        const std::vector<LocalForces> q_prev = q_l;
        auto fail = [&](const std::string& why, int iters, double rho_now) {
            res.u = u_prev;
            res.lambda = lambda_prev;
            res.f_int = assemble_internal(model, u_prev).f_int;
            res.trace.push_back({inc, iters, rho_now});
            res.converged = false;
            res.failure = "increment " + std::to_string(inc) + ": " + why;
            res.contact_forces = res.lambda.cwiseProduct(load.f_ref);
        };

        Eigen::VectorXd du;
        try {
            Eigen::MatrixXd k_s = assemble_tangent(model, res.u, q_l);
            apply_constraints_in_place(k_s, model.constraints);
            const TangentFactorization fact(k_s);
            bool ok = true;
            Eigen::VectorXd dl_c(0);
            if (nc > 0) {
                const Eigen::MatrixXd s =
                    detail::control_influence(fact, load.f_ref, ctrl, n);
                dl_c = detail::solve_control(s, du_bar_c, ok);
            }
            if (!ok) {
                fail("control DOF insensitive to F_ref", 0, 0.0);
                return res;
            }
            Eigen::VectorXd df = Eigen::VectorXd::Zero(n);
            for (int a = 0; a < nc; ++a) {
                res.lambda[ctrl[a]] += dl_c[a];
                df[ctrl[a]] = dl_c[a] * load.f_ref[ctrl[a]];
            }
            du = fact.solve(df);
        } catch (const SingularMatrixError& e) {
            fail(e.what(), 0, 0.0);
            return res;
        }
        res.u += du;

        InternalForces state = assemble_internal(model, res.u);
        Eigen::VectorXd residual = res.lambda.cwiseProduct(load.f_ref) - state.f_int;
        detail::zero_fixed(residual, model.constraints);
        double rho = residual.norm();

        int k = 0;
        Eigen::VectorXd delta_u = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd delta_lambda = Eigen::VectorXd::Zero(n);
        std::vector<LocalForces> q_temp = state.q_l;
        bool aborted = false;
        while (rho > settings.tolerance && k < settings.maxiter) {
            try {
                Eigen::MatrixXd k_s = assemble_tangent(model, res.u + delta_u, q_temp);
                apply_constraints_in_place(k_s, model.constraints);
                const TangentFactorization fact(k_s);
                const Eigen::VectorXd u_acute = fact.solve(residual);
                Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
                if (nc > 0) {
                    const Eigen::MatrixXd s =
                        detail::control_influence(fact, load.f_ref, ctrl, n);
                    Eigen::VectorXd rhs(nc);
                    for (int a = 0; a < nc; ++a) rhs[a] = u_acute[ctrl[a]];
                    bool ok = true;
                    const Eigen::VectorXd ratio = detail::solve_control(s, rhs, ok);
                    if (!ok) {
                        fail("control DOF insensitive to F_ref", k, rho);
                        aborted = true;
                        break;
                    }
                    for (int a = 0; a < nc; ++a) {
                        delta_lambda[ctrl[a]] -= ratio[a];
                        g[ctrl[a]] = ratio[a] * load.f_ref[ctrl[a]];
                    }
                }
                delta_u += fact.solve(residual - g);
            } catch (const SingularMatrixError& e) {
                fail(e.what(), k, rho);
                aborted = true;
                break;
            }
            state = assemble_internal(model, res.u + delta_u);
            q_temp = state.q_l;
            residual = (res.lambda + delta_lambda).cwiseProduct(load.f_ref) - state.f_int;
            detail::zero_fixed(residual, model.constraints);
            rho = residual.norm();
            ++k;
        }
        if (aborted) return res;
        if (rho > settings.tolerance) {
            fail("did not converge within " + std::to_string(settings.maxiter) + " iterations",
                 k, rho);
            return res;
        }
        res.lambda += delta_lambda;
        res.u += delta_u;
        q_l = q_temp;
        res.f_int = state.f_int;
        res.trace.push_back({inc, k, rho});
    }
    res.converged = true;
    res.contact_forces = res.lambda.cwiseProduct(load.f_ref);
    return res;
}

/**
 * @brief Incremental Newton force control: apply f_ext in n_inc equal steps.
 *
 * At each step, iterate u += K_s^{-1}(F_applied - F_int) until the free-DOF
 * imbalance norm drops to the tolerance. Used for forward (design-style)
 * solves and as the round-trip comparator for displacement control.
 */
inline SolveResult force_control(const StructureModel& model, const Eigen::VectorXd& f_ext,
                                 const SolverSettings& settings) {
    {
        const auto model_defects = validate(model);
        if (!model_defects.empty())
            throw std::invalid_argument("force_control: invalid model: " + model_defects.front());
        if (f_ext.size() != model.n_dofs())
            throw std::invalid_argument("force_control: force vector size mismatch");
        for (int d : model.constraints)
            if (f_ext[d] != 0.0)
                throw std::invalid_argument("force_control: nonzero force at constrained dof " +
                                            std::to_string(d));
        if (!(settings.tolerance > 0.0) || settings.maxiter < 1 || settings.n_inc < 1)
            throw std::invalid_argument("force_control: invalid solver settings");
    }
    const int n = model.n_dofs();
    SolveResult res;
    res.u = Eigen::VectorXd::Zero(n);
    res.lambda = Eigen::VectorXd::Zero(n);
    res.contact_forces = Eigen::VectorXd::Zero(n);
    res.trace.reserve(settings.n_inc);

    InternalForces state = assemble_internal(model, res.u);
    for (int step = 1; step <= settings.n_inc; ++step) {
        const Eigen::VectorXd u_prev = res.u;
        const Eigen::VectorXd f_applied =
            (static_cast<double>(step) / settings.n_inc) * f_ext;
        Eigen::VectorXd residual = f_applied - state.f_int;
        detail::zero_fixed(residual, model.constraints);
        double rho = residual.norm();
        int k = 0;
        bool singular = false;
        std::string singular_what;
        while (rho > settings.tolerance && k < settings.maxiter) {
            try {
                Eigen::MatrixXd k_s = assemble_tangent(model, res.u, state.q_l);
                apply_constraints_in_place(k_s, model.constraints);
                res.u += TangentFactorization(k_s).solve(residual);
            } catch (const SingularMatrixError& e) {
                singular = true;
                singular_what = e.what();
                break;
            }
            state = assemble_internal(model, res.u);
            residual = f_applied - state.f_int;
            detail::zero_fixed(residual, model.constraints);
            rho = residual.norm();
            ++k;
        }
        if (singular || rho > settings.tolerance) {
            res.u = u_prev;
            state = assemble_internal(model, res.u);
            res.f_int = state.f_int;
            res.trace.push_back({step, k, rho});
            res.converged = false;
            res.failure = "step " + std::to_string(step) + ": " +
                          (singular ? singular_what
                                    : "did not converge within " +
                                          std::to_string(settings.maxiter) + " iterations");
            return res;
        }
        res.trace.push_back({step, k, rho});
    }
    res.f_int = state.f_int;
    res.converged = true;
    return res;
}

/// Support reactions: F_int entries at the constrained DOFs (zero elsewhere).
inline Eigen::VectorXd reaction_forces(const StructureModel& model, const SolveResult& state) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(model.n_dofs());
    for (int d : model.constraints) r[d] = state.f_int[d];
    return r;
}

}  // namespace finbeam
