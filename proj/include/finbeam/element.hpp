#pragma once

#include <Eigen/Dense>
#include <numbers>

#include "finbeam/model.hpp"

namespace finbeam {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix36 = Eigen::Matrix<double, 3, 6>;

/// Current pose of a member: chord length and inclination.
struct ElementFrame {
    double L = 0.0;     ///< current chord length [m]
    double c = 1.0;     ///< cos(beta)
    double s = 0.0;     ///< sin(beta)
    double beta = 0.0;  ///< current inclination [rad]
};

/// Deformation measured in the co-rotated frame (rigid motion removed).
struct LocalDeformation {
    double u_bar = 0.0;    ///< axial stretch [m]
    double theta1l = 0.0;  ///< local end rotation at node i [rad]
    double theta2l = 0.0;  ///< local end rotation at node j [rad]
};

/// Local internal force resultants q_l.
struct LocalForces {
    double N = 0.0;   ///< axial force [N]
    double M1 = 0.0;  ///< end moment at node i [N*m]
    double M2 = 0.0;  ///< end moment at node j [N*m]
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    double r = std::remainder(a, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

/**
 * @brief Elastic length left after subtracting the rigid node radii.
 *
 * Both member ends sit in a rigid connection region of radius R_m = mu * R_node,
 * so the flexible span is raw_length - 2*R_m. Throws std::domain_error when the
 * result would not be positive.
 */
inline double effective_length(double raw_length, double r_node, double mu) {
    const double reduced = raw_length - 2.0 * mu * r_node;
    if (!(reduced > 0.0))
        throw std::domain_error("member fully absorbed by node radius (raw length " +
                                std::to_string(raw_length) + " m, 2*R_m " +
                                std::to_string(2.0 * mu * r_node) + " m)");
    return reduced;
}

/// Local element DOF gather: [ux_i, uy_i, th_i, ux_j, uy_j, th_j].
inline Vector6 element_dofs(const Member& m, const Eigen::VectorXd& u) {
    Vector6 d;
    d << u[3 * m.node_i], u[3 * m.node_i + 1], u[3 * m.node_i + 2],
         u[3 * m.node_j], u[3 * m.node_j + 1], u[3 * m.node_j + 2];
    return d;
}

/**
 * @brief Current pose (L, c, s, beta) of a member under displacements u.
 *
 * L is the Euclidean distance between the displaced node positions,
 * c = dx/L, s = dy/L, beta = atan2(s, c). Throws std::domain_error when the
 * displaced nodes coincide.
 */
inline ElementFrame current_frame(const StructureModel& model, const Member& m,
                                  const Eigen::VectorXd& u) {
    const Node& a = model.nodes[m.node_i];
    const Node& b = model.nodes[m.node_j];
    const double dx = (b.x0 + u[3 * m.node_j]) - (a.x0 + u[3 * m.node_i]);
    const double dy = (b.y0 + u[3 * m.node_j + 1]) - (a.y0 + u[3 * m.node_i + 1]);
    ElementFrame f;
    f.L = std::hypot(dx, dy);
    if (!(f.L > 0.0))
        throw std::domain_error("zero-length element: member " + std::to_string(m.id) +
                                " has coincident displaced nodes");
    f.c = dx / f.L;
    f.s = dy / f.L;
    f.beta = std::atan2(dy, dx);
    return f;
}

/**
 * @brief Strip the rigid motion: stretch and local end rotations.
 *
 * The deformed chord gets the same 2*R_m reduction as L0, so
 * u_bar = (L - 2*rm) - L0_eff and the stress-free state has u_bar = 0.
 * Local rotations are the nodal rotations minus the frame rotation
 * beta - beta0, wrapped to (-pi, pi].
 */
inline LocalDeformation local_deformation(const Member& m, const ElementFrame& frame,
                                          double theta_i, double theta_j) {
    const double rigid = wrap_angle(frame.beta - m.beta0);
    LocalDeformation d;
    d.u_bar = (frame.L - 2.0 * m.rm) - m.L0_eff;
    d.theta1l = wrap_angle(theta_i - rigid);
    d.theta2l = wrap_angle(theta_j - rigid);
    return d;
}

/// Linear local force law: N = (EA/L0) u_bar, M = (2EI/L0)(2th_a + th_b).
inline LocalForces local_forces(const Member& m, const LocalDeformation& d) {
    LocalForces q;
    q.N = m.E * m.A / m.L0_eff * d.u_bar;
    const double k = 2.0 * m.E * m.I / m.L0_eff;
    q.M1 = k * (2.0 * d.theta1l + d.theta2l);
    q.M2 = k * (d.theta1l + 2.0 * d.theta2l);
    return q;
}

/// Strain energy of the member at a given local deformation.
inline double strain_energy(const Member& m, const LocalDeformation& d) {
    const double axial = 0.5 * m.E * m.A / m.L0_eff * d.u_bar * d.u_bar;
    const double bend = m.E * m.I / m.L0_eff *
                        (2.0 * d.theta1l * d.theta1l + 2.0 * d.theta1l * d.theta2l +
                         2.0 * d.theta2l * d.theta2l);
    return axial + bend;
}

/// Kinematic matrix B mapping global DOF rates to (u_bar, th1l, th2l) rates.
inline Matrix36 b_matrix(const ElementFrame& f) {
    const double c = f.c, s = f.s, L = f.L;
    Matrix36 B;
    B << -c, -s, 0.0, c, s, 0.0,
         -s / L, c / L, 1.0, s / L, -c / L, 0.0,
         -s / L, c / L, 0.0, s / L, -c / L, 1.0;
    return B;
}

/// Element contribution to the global internal force vector: B^T q_l.
inline Vector6 global_internal_force(const Member&, const ElementFrame& frame,
                                     const LocalForces& q) {
    Eigen::Vector3d ql(q.N, q.M1, q.M2);
    return b_matrix(frame).transpose() * ql;
}

}  // namespace finbeam
