#include <catch2/catch_amalgamated.hpp>

#include "finbeam/finray.hpp"
#include "finbeam/verify.hpp"
#include "test_helpers.hpp"

using namespace finbeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using test_helpers::make_cantilever;

TEST_CASE("cantilever_oracle", "[verify]") {
    CHECK_THAT(cantilever_oracle(2e7, test_helpers::inertia(), 0.08, 0.8e-3),
               WithinRel(1.5625e-4, 1e-4));
    CHECK(cantilever_oracle(2e7, 1.6667e-12, 0.08, 0.0) == 0.0);
    CHECK_THROWS_AS(cantilever_oracle(2e7, 1.6667e-12, 0.08, 0.008), std::domain_error);
}

TEST_CASE("fd_tangent_check validates the tangent at rest", "[verify]") {
    const StructureModel single = make_cantilever(0.08);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(single.n_dofs());
    CHECK(fd_tangent_check(single, u0, 1e-9) <= 1e-4);

    FinRayParams p;
    p.density = MeshDensity::Dense;
    p.mu = 0.7;
    const StructureModel dense = generate(p);
    CHECK(fd_tangent_check(dense, Eigen::VectorXd::Zero(dense.n_dofs()), 1e-7) <= 1e-3);
}

TEST_CASE("fd_tangent_check error grows with the step (truncation trend)", "[verify]") {
    const StructureModel m = make_cantilever(0.08);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m.n_dofs());
    u[3] = 1e-3;
    u[4] = 8e-3;
    u[5] = 0.12;
    const double coarse = fd_tangent_check(m, u, 1e-2);
    const double fine = fd_tangent_check(m, u, 1e-4);
    CHECK(coarse > 10.0 * fine);
}

TEST_CASE("tangent stays consistent along a whole solve path", "[verify]") {
    // The state after increment k of an n-increment run equals the final state
    // of a run targeting k/n of the displacement with k increments (the step
    // size is identical and the solver is deterministic), so a converged path
    // can be sampled increment by increment.
    FinRayParams p;
    p.density = MeshDensity::Dense;
    p.mu = 0.7;
    const StructureModel model = generate(p);
    const int n_inc = 10;
    for (int k = 1; k <= n_inc; ++k) {
        DisplacementLoadCase load;
        load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
        load.d_total[model.dof_index(5, DofKind::X)] = 6e-3 * k / n_inc;
        load.f_ref = auto_reference_force(model, load.d_total);
        SolverSettings settings;
        settings.n_inc = k;
        const SolveResult res = displacement_control(model, load, settings);
        REQUIRE(res.converged);
        REQUIRE(fd_tangent_check(model, res.u, 1e-7) <= 1e-3);
    }
}

TEST_CASE("round trip: single-node fin-ray cell closes tightly", "[verify]") {
    FinRayParams p;
    p.density = MeshDensity::Dense;
    p.mu = 0.7;
    const StructureModel model = generate(p);
    DisplacementLoadCase load;
    load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
    load.d_total[model.dof_index(5, DofKind::X)] = 2e-3;
    load.f_ref = auto_reference_force(model, load.d_total);
    SolverSettings settings;
    settings.n_inc = 50;
    const RoundTripResult rt = round_trip(model, load, settings);
    REQUIRE_FALSE(rt.na);
    REQUIRE(rt.entries.size() == 1);
    CHECK(rt.entries[0].node == 5);
    CHECK(std::abs(rt.entries[0].error_pct) <= 0.5);
    CHECK(rt.state_divergence < 1e-3);
}

TEST_CASE("round trip: two controlled DOFs give two entries", "[verify]") {
    FinRayParams p;
    p.density = MeshDensity::Dense;
    p.mu = 0.7;
    const StructureModel model = generate(p);
    DisplacementLoadCase load;
    load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
    load.d_total[model.dof_index(4, DofKind::X)] = 8e-3;
    load.d_total[model.dof_index(7, DofKind::X)] = 4e-3;
    load.f_ref = auto_reference_force(model, load.d_total);
    SolverSettings settings;
    settings.n_inc = 60;
    const RoundTripResult rt = round_trip(model, load, settings);
    REQUIRE_FALSE(rt.na);
    REQUIRE(rt.entries.size() == 2);
    CHECK(rt.entries[0].node == 4);
    CHECK(rt.entries[1].node == 7);
    for (const auto& e : rt.entries) CHECK(std::abs(e.error_pct) <= 0.5);
}

TEST_CASE("round trip: nothing imposed, nothing reported", "[verify]") {
    const StructureModel model = make_cantilever(0.08);
    DisplacementLoadCase load;
    load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
    load.f_ref = Eigen::VectorXd::Zero(model.n_dofs());
    SolverSettings settings;
    settings.n_inc = 2;
    const RoundTripResult rt = round_trip(model, load, settings);
    CHECK_FALSE(rt.na);
    CHECK(rt.entries.empty());
    CHECK(rt.avg_abs_error_pct() == 0.0);
}

TEST_CASE("error report averages absolute values and skips N.A. cells", "[verify]") {
    ErrorReport report;
    report.cells.push_back({"node 2", "(2)", false, "", {-4.0}, {0.5}});
    report.cells.push_back({"node 2", "(4)", false, "", {6.0}, {0.9}});
    report.cells.push_back({"node 3", "(2)", false, "", {-2.0}, {0.3}});
    report.cells.push_back({"node 3", "(4)", true, "comparator invalid", {}, {}});
    CHECK_THAT(report.overall(), WithinRel(4.0, 1e-12));  // (4 + 6 + 2) / 3
    const auto groups = report.per_group();
    CHECK_THAT(groups.at("node 2"), WithinRel(5.0, 1e-12));
    CHECK_THAT(groups.at("node 3"), WithinRel(2.0, 1e-12));
    const auto levels = report.per_level();
    CHECK_THAT(levels.at("(2)"), WithinRel(3.0, 1e-12));
    CHECK_THAT(levels.at("(4)"), WithinRel(6.0, 1e-12));

    ErrorReport::Cell multi{"node 9", "(2)", false, "", {3.0, -5.0}, {0.1, 0.2}};
    CHECK_THAT(multi.avg_abs(), WithinRel(4.0, 1e-12));
}
