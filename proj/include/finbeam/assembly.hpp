#pragma once

#include <Eigen/Dense>
#include <array>

#include "finbeam/element.hpp"
#include "finbeam/model.hpp"

namespace finbeam {

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

inline std::array<int, 6> element_dof_indices(const Member& m) {
    return {3 * m.node_i, 3 * m.node_i + 1, 3 * m.node_i + 2,
            3 * m.node_j, 3 * m.node_j + 1, 3 * m.node_j + 2};
}

/**
 * @brief Consistent tangent stiffness of one member in global axes.
 *
 * K_e = B^T C_l B + (N/L) z z^T + ((M1+M2)/L^2)(r z^T + z r^T)
 * with C_l = diag-block [EA/L0; [4EI/L0, 2EI/L0; 2EI/L0, 4EI/L0]],
 * r = [-c,-s,0,c,s,0]^T and z = [s,-c,0,-s,c,0]^T. The result is the exact
 * derivative of global_internal_force with respect to the element DOFs.
 */
inline Matrix6 element_tangent(const Member& m, const ElementFrame& f, const LocalForces& q) {
    const Matrix36 B = b_matrix(f);
    const double ea = m.E * m.A / m.L0_eff;
    const double ei4 = 4.0 * m.E * m.I / m.L0_eff;
    const double ei2 = 2.0 * m.E * m.I / m.L0_eff;
    Eigen::Matrix3d Cl;
    Cl << ea, 0.0, 0.0,
          0.0, ei4, ei2,
          0.0, ei2, ei4;
    Vector6 r, z;
    r << -f.c, -f.s, 0.0, f.c, f.s, 0.0;
    z << f.s, -f.c, 0.0, -f.s, f.c, 0.0;
    Matrix6 K = B.transpose() * Cl * B;
    K.noalias() += (q.N / f.L) * (z * z.transpose());
    K.noalias() += ((q.M1 + q.M2) / (f.L * f.L)) * (r * z.transpose() + z * r.transpose());
    return K;
}

/// Per-member local forces plus the assembled global internal force vector.
struct InternalForces {
    Eigen::VectorXd f_int;
    std::vector<LocalForces> q_l;
};

/// Sweep all members at displacement u: frames, local forces, global F_int.
inline InternalForces assemble_internal(const StructureModel& model, const Eigen::VectorXd& u) {
    InternalForces out;
    out.f_int = Eigen::VectorXd::Zero(model.n_dofs());
    out.q_l.reserve(model.members.size());
    for (const Member& m : model.members) {
        const ElementFrame f = current_frame(model, m, u);
        const LocalDeformation d =
            local_deformation(m, f, u[3 * m.node_i + 2], u[3 * m.node_j + 2]);
        const LocalForces q = local_forces(m, d);
        const Vector6 fe = global_internal_force(m, f, q);
        const auto dofs = element_dof_indices(m);
        for (int k = 0; k < 6; ++k) out.f_int[dofs[k]] += fe[k];
        out.q_l.push_back(q);
    }
    return out;
}

/**
 * @brief Scatter-add every element tangent into the global matrix.
 *
 * q_l_all must be consistent with u (typically from assemble_internal at the
 * same u, or the solver's stored trial forces). Dense storage: the models of
 * interest stay below ~200 DOFs.
 */
inline Eigen::MatrixXd assemble_tangent(const StructureModel& model, const Eigen::VectorXd& u,
                                        const std::vector<LocalForces>& q_l_all) {
    const int n = model.n_dofs();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (size_t idx = 0; idx < model.members.size(); ++idx) {
        const Member& m = model.members[idx];
        const ElementFrame f = current_frame(model, m, u);
        const Matrix6 Ke = element_tangent(m, f, q_l_all[idx]);
        const auto dofs = element_dof_indices(m);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) K(dofs[a], dofs[b]) += Ke(a, b);
    }
    return K;
}

/// Zero row/column of each fixed DOF and put 1 on the diagonal (K_s).
inline void apply_constraints_in_place(Eigen::MatrixXd& K, const std::vector<int>& fixed) {
    for (int d : fixed) {
        K.row(d).setZero();
        K.col(d).setZero();
        K(d, d) = 1.0;
    }
}

inline Eigen::MatrixXd apply_constraints(Eigen::MatrixXd K, const std::vector<int>& fixed) {
    apply_constraints_in_place(K, fixed);
    return K;
}

/**
 * @brief LU factorization of a constrained tangent with a singularity guard.
 *
 * Factoring throws SingularMatrixError when any pivot falls below
 * 1e-14 times the largest diagonal entry of K_s; that covers both
 * under-constrained structures and limit points.
 */
class TangentFactorization {
public:
    explicit TangentFactorization(const Eigen::MatrixXd& k_s) : lu_(k_s) {
        const double max_diag = k_s.diagonal().cwiseAbs().maxCoeff();
        const double min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(min_pivot > 1e-14 * max_diag))
            throw SingularMatrixError(
                "singular tangent - structure under-constrained or at limit point");
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// One-shot solve K_s x = rhs; entries at fixed DOFs pass through from rhs.
inline Eigen::VectorXd solve_linear(const Eigen::MatrixXd& k_s, const Eigen::VectorXd& rhs) {
    return TangentFactorization(k_s).solve(rhs);
}

}  // namespace finbeam
