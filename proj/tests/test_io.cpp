#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "finbeam/finray.hpp"
#include "finbeam/structure_io.hpp"
#include "test_helpers.hpp"

using namespace finbeam;

namespace {

void check_equal(const StructureModel& a, const StructureModel& b) {
    REQUIRE(a.n_nodes() == b.n_nodes());
    REQUIRE(a.n_members() == b.n_members());
    for (int k = 0; k < a.n_nodes(); ++k) {
        CHECK(a.nodes[k].id == b.nodes[k].id);
        CHECK(a.nodes[k].x0 == b.nodes[k].x0);
        CHECK(a.nodes[k].y0 == b.nodes[k].y0);
    }
    for (int k = 0; k < a.n_members(); ++k) {
        const Member& ma = a.members[k];
        const Member& mb = b.members[k];
        CHECK(ma.node_i == mb.node_i);
        CHECK(ma.node_j == mb.node_j);
        CHECK(ma.E == mb.E);
        CHECK(ma.A == mb.A);
        CHECK(ma.I == mb.I);
        CHECK(ma.rm == mb.rm);
        CHECK(ma.L0_eff == mb.L0_eff);
        CHECK(ma.beta0 == mb.beta0);
    }
    CHECK(a.constraints == b.constraints);
}

StructureModel roundtrip(const StructureModel& m) {
    std::stringstream ss;
    write_structure(m, ss);
    return read_structure(ss, "<roundtrip>");
}

}  // namespace

TEST_CASE("structure files round-trip the fin-ray models losslessly", "[io]") {
    for (MeshDensity d : {MeshDensity::Sparse, MeshDensity::Dense}) {
        FinRayParams p;
        p.density = d;
        p.mu = 0.7;
        const StructureModel m = generate(p);
        check_equal(m, roundtrip(m));
    }
}

TEST_CASE("structure files round-trip randomized models losslessly", "[io]") {
    std::mt19937 rng(414243);
    std::uniform_real_distribution<double> coord(-2.0, 2.0), prop(0.1, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        StructureModel m;
        const int nn = 3 + static_cast<int>(rng() % 5);
        for (int k = 0; k < nn; ++k) m.nodes.push_back({k, coord(rng), coord(rng)});
        for (int k = 0; k + 1 < nn; ++k)
            m.members.push_back(make_member(m.nodes, k, k, k + 1, 1e7 * prop(rng),
                                            1e-5 * prop(rng), 1e-12 * prop(rng), 0.0));
        m.constraints = {0, 1, 2};
        check_equal(m, roundtrip(m));
    }
}

TEST_CASE("file writer and reader agree through the filesystem", "[io]") {
    test_helpers::TempDir dir("io");
    const StructureModel m = generate(FinRayParams{});
    const std::string path = dir.str("sparse.fbm");
    write_structure_file(m, path);
    check_equal(m, read_structure_file(path));
}

TEST_CASE("parse errors carry file and line anchors", "[io]") {
    auto parse = [](const std::string& text) {
        std::stringstream ss(text);
        return read_structure(ss, "model.fbm");
    };
    SECTION("unknown section") {
        try {
            parse("[nodes]\n0 0 0\n[junk]\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("model.fbm:3"));
        }
    }
    SECTION("bad number") {
        CHECK_THROWS_AS(parse("[nodes]\n0 zero 0\n"), ParseError);
    }
    SECTION("non-contiguous node ids") {
        CHECK_THROWS_AS(parse("[nodes]\n0 0 0\n2 1 0\n"), ParseError);
    }
    SECTION("bad dof name") {
        CHECK_THROWS_AS(parse("[nodes]\n0 0 0\n[constraints]\n0 z\n"), ParseError);
    }
    SECTION("data before any section") {
        CHECK_THROWS_AS(parse("0 0 0\n"), ParseError);
    }
    SECTION("member absorbed by its rm") {
        const std::string text =
            "[nodes]\n0 0 0\n1 0.001 0\n[members]\n0 0 1 2e7 2e-5 1.7e-12 0.00075\n";
        try {
            parse(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);  // the member's own row
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("absorbed"));
        }
    }
    SECTION("wrong column count") {
        CHECK_THROWS_AS(parse("[nodes]\n0 0\n"), ParseError);
    }
}

TEST_CASE("comments and blank lines are ignored", "[io]") {
    const std::string text =
        "# header comment\n\n[nodes]\n# id x y\n0 0 0\n1 1 0  # inline\n"
        "[members]\n0 0 1 2e7 2e-5 1.7e-12\n[constraints]\n0 x\n0 y\n0 rot\n";
    std::stringstream ss(text);
    const StructureModel m = read_structure(ss, "<mem>");
    CHECK(m.n_nodes() == 2);
    CHECK(m.n_members() == 1);
    CHECK(m.constraints == std::vector<int>{0, 1, 2});
    CHECK(m.members[0].rm == 0.0);
}
