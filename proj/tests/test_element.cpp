#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "finbeam/element.hpp"
#include "test_helpers.hpp"

using namespace finbeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using test_helpers::make_cantilever;

namespace {

/// Two-node model with an arbitrary orientation, rm optional.
StructureModel two_node(double xj, double yj, double rm = 0.0) {
    StructureModel model;
    model.nodes = {{0, 0.0, 0.0}, {1, xj, yj}};
    model.members = {make_member(model.nodes, 0, 0, 1, test_helpers::kE, test_helpers::area(),
                                 test_helpers::inertia(), rm)};
    model.constraints = {0, 1, 2};
    return model;
}

}  // namespace

TEST_CASE("effective_length subtracts the rigid node radii", "[element]") {
    CHECK_THAT(effective_length(0.01, 0.75e-3, 0.7), WithinRel(0.00895, 1e-12));
    CHECK_THAT(effective_length(0.01, 0.75e-3, 0.0), WithinRel(0.01, 1e-15));
    CHECK_THROWS_AS(effective_length(0.001, 0.75e-3, 1.0), std::domain_error);
}

TEST_CASE("current_frame follows the displaced chord", "[element]") {
    SECTION("undeformed horizontal element") {
        StructureModel m = two_node(1.0, 0.0);
        const ElementFrame f = current_frame(m, m.members[0], Eigen::VectorXd::Zero(6));
        CHECK_THAT(f.L, WithinRel(1.0, 1e-15));
        CHECK_THAT(f.c, WithinRel(1.0, 1e-15));
        CHECK_THAT(f.s, WithinAbs(0.0, 1e-15));
    }
    SECTION("undeformed vertical element") {
        StructureModel m = two_node(0.0, 1.0);
        const ElementFrame f = current_frame(m, m.members[0], Eigen::VectorXd::Zero(6));
        CHECK_THAT(f.L, WithinRel(1.0, 1e-15));
        CHECK_THAT(f.c, WithinAbs(0.0, 1e-15));
        CHECK_THAT(f.s, WithinRel(1.0, 1e-15));
    }
    SECTION("node j displaced transversely") {
        StructureModel m = two_node(1.0, 0.0);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
        u[4] = 1.0;
        const ElementFrame f = current_frame(m, m.members[0], u);
        CHECK_THAT(f.L, WithinRel(std::sqrt(2.0), 1e-14));
        CHECK_THAT(f.c, WithinRel(std::sqrt(2.0) / 2.0, 1e-14));
        CHECK_THAT(f.s, WithinRel(std::sqrt(2.0) / 2.0, 1e-14));
    }
    SECTION("coincident displaced nodes") {
        StructureModel m = two_node(1.0, 0.0);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
        u[3] = -1.0;
        CHECK_THROWS_AS(current_frame(m, m.members[0], u), std::domain_error);
    }
}

TEST_CASE("local_deformation strips rigid motion", "[element]") {
    StructureModel m = two_node(1.0, 0.0);
    const Member& mb = m.members[0];
    SECTION("zero displacement") {
        const ElementFrame f = current_frame(m, mb, Eigen::VectorXd::Zero(6));
        const LocalDeformation d = local_deformation(mb, f, 0.0, 0.0);
        CHECK_THAT(d.u_bar, WithinAbs(0.0, 1e-15));
        CHECK_THAT(d.theta1l, WithinAbs(0.0, 1e-15));
        CHECK_THAT(d.theta2l, WithinAbs(0.0, 1e-15));
    }
    SECTION("rigid rotation about node i") {
        const double alpha = 0.37;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
        u[3] = std::cos(alpha) - 1.0;
        u[4] = std::sin(alpha);
        u[2] = alpha;
        u[5] = alpha;
        const ElementFrame f = current_frame(m, mb, u);
        const LocalDeformation d = local_deformation(mb, f, u[2], u[5]);
        CHECK_THAT(d.u_bar, WithinAbs(0.0, 1e-14));
        CHECK_THAT(d.theta1l, WithinAbs(0.0, 1e-14));
        CHECK_THAT(d.theta2l, WithinAbs(0.0, 1e-14));
    }
    SECTION("pure stretch") {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
        u[3] = 1e-4;
        const ElementFrame f = current_frame(m, mb, u);
        const LocalDeformation d = local_deformation(mb, f, 0.0, 0.0);
        CHECK_THAT(d.u_bar, WithinRel(1e-4, 1e-9));
        CHECK_THAT(d.theta1l, WithinAbs(0.0, 1e-15));
        CHECK_THAT(d.theta2l, WithinAbs(0.0, 1e-15));
    }
    SECTION("rm shortens both reference and current lengths") {
        StructureModel mr = two_node(1.0, 0.0, 0.75e-3);
        const ElementFrame f = current_frame(mr, mr.members[0], Eigen::VectorXd::Zero(6));
        const LocalDeformation d = local_deformation(mr.members[0], f, 0.0, 0.0);
        CHECK_THAT(d.u_bar, WithinAbs(0.0, 1e-15));  // rest state is stress-free
    }
}

TEST_CASE("local_forces applies the linear local law", "[element]") {
    Member mb;
    mb.E = 2e7;
    mb.A = 2e-5;
    mb.I = test_helpers::inertia();
    mb.L0_eff = 0.01;
    SECTION("zero deformation") {
        const LocalForces q = local_forces(mb, {0.0, 0.0, 0.0});
        CHECK(q.N == 0.0);
        CHECK(q.M1 == 0.0);
        CHECK(q.M2 == 0.0);
    }
    SECTION("axial") {
        const LocalForces q = local_forces(mb, {1e-4, 0.0, 0.0});
        CHECK_THAT(q.N, WithinRel(4.0, 1e-12));
    }
    SECTION("symmetric bending") {
        const LocalForces q = local_forces(mb, {0.0, 0.01, 0.01});
        CHECK_THAT(q.M1, WithinRel(2.0e-4, 1e-12));
        CHECK_THAT(q.M2, WithinRel(2.0e-4, 1e-12));
    }
    SECTION("linearity: f(alpha d) = alpha f(d)") {
        const LocalDeformation d{3.7e-5, 0.021, -0.013};
        const LocalForces q1 = local_forces(mb, d);
        const LocalForces q2 = local_forces(mb, {2.0 * d.u_bar, 2.0 * d.theta1l, 2.0 * d.theta2l});
        CHECK(q2.N == 2.0 * q1.N);  // power-of-two scaling is exact
        CHECK(q2.M1 == 2.0 * q1.M1);
        CHECK(q2.M2 == 2.0 * q1.M2);
    }
}

TEST_CASE("global_internal_force transforms through B", "[element]") {
    StructureModel m = two_node(1.0, 0.0);
    const Member& mb = m.members[0];
    const ElementFrame f = current_frame(m, mb, Eigen::VectorXd::Zero(6));
    SECTION("zero local forces") {
        CHECK(global_internal_force(mb, f, {0.0, 0.0, 0.0}).norm() == 0.0);
    }
    SECTION("pure axial on a horizontal element") {
        const Vector6 fe = global_internal_force(mb, f, {4.0, 0.0, 0.0});
        Vector6 expected;
        expected << -4.0, 0.0, 0.0, 4.0, 0.0, 0.0;
        CHECK((fe - expected).norm() < 1e-12);
    }
    SECTION("rigid translation leaves forces at zero") {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
        u[0] = u[3] = 0.3;
        u[1] = u[4] = -0.2;
        const ElementFrame ft = current_frame(m, mb, u);
        const LocalDeformation d = local_deformation(mb, ft, 0.0, 0.0);
        const Vector6 fe = global_internal_force(mb, ft, local_forces(mb, d));
        CHECK(fe.cwiseAbs().maxCoeff() < 1e-9 * mb.E * mb.A);
    }
}

TEST_CASE("rigid-body motions produce no internal force", "[element]") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> trans(-1.0, 1.0), rot(-0.5, 0.5), geom(-0.6, 0.6);
    for (int trial = 0; trial < 200; ++trial) {
        const double xj = geom(rng), yj = geom(rng);
        if (std::hypot(xj, yj) < 1e-2) continue;
        StructureModel m = two_node(xj, yj);
        const Member& mb = m.members[0];
        const double tx = trans(rng), ty = trans(rng), alpha = rot(rng);
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        auto rigid = [&](double x, double y, double& ux, double& uy) {
            ux = ca * x - sa * y + tx - x;
            uy = sa * x + ca * y + ty - y;
        };
        Eigen::VectorXd u(6);
        rigid(0.0, 0.0, u[0], u[1]);
        rigid(xj, yj, u[3], u[4]);
        u[2] = u[5] = alpha;
        const ElementFrame f = current_frame(m, mb, u);
        CHECK_THAT(f.c * f.c + f.s * f.s, WithinAbs(1.0, 1e-12));
        const LocalDeformation d = local_deformation(mb, f, u[2], u[5]);
        const Vector6 fe = global_internal_force(mb, f, local_forces(mb, d));
        REQUIRE(fe.cwiseAbs().maxCoeff() <= 1e-9 * mb.E * mb.A);
    }
}

TEST_CASE("internal force is the strain-energy gradient", "[element]") {
    StructureModel m = two_node(0.7, 0.4);
    const Member& mb = m.members[0];
    Eigen::VectorXd u(6);
    u << 0.01, -0.02, 0.15, 0.05, 0.06, -0.08;  // a moderately deformed state

    auto energy_at = [&](const Eigen::VectorXd& uu) {
        const ElementFrame f = current_frame(m, mb, uu);
        return strain_energy(mb, local_deformation(mb, f, uu[2], uu[5]));
    };
    const ElementFrame f = current_frame(m, mb, u);
    const Vector6 fe =
        global_internal_force(mb, f, local_forces(mb, local_deformation(mb, f, u[2], u[5])));

    // h balances truncation against roundoff in the energy difference
    const double h = 1e-5 * f.L;
    for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd up = u, um = u;
        up[j] += h;
        um[j] -= h;
        const double grad = (energy_at(up) - energy_at(um)) / (2.0 * h);
        REQUIRE_THAT(grad, WithinRel(fe[j], 1e-5));
    }
}

TEST_CASE("wrap_angle lands in (-pi, pi]", "[element]") {
    constexpr double pi = std::numbers::pi;
    CHECK_THAT(wrap_angle(0.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(wrap_angle(3.0 * pi), WithinRel(pi, 1e-12));
    CHECK_THAT(wrap_angle(-3.0 * pi), WithinRel(pi, 1e-12));
    CHECK_THAT(wrap_angle(2.0 * pi + 0.1), WithinRel(0.1, 1e-10));
    CHECK(wrap_angle(-pi) > 0.0);
}
