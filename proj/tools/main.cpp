#include <CLI11.hpp>

#include <iostream>

#include "finbeam/finbeam.hpp"

namespace {

using namespace finbeam;

int cmd_mesh(const FinRayParams& params, const std::string& out) {
    const StructureModel model = generate(params);
    write_structure_file(model, out);
    std::cout << density_name(params.density) << " fin-ray model: " << model.n_nodes()
              << " nodes, " << model.n_members() << " members, mu=" << params.mu_value()
              << " -> " << out << "\n";
    return 0;
}

struct CheckList {
    int failed = 0;
    void check(const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failed;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int cmd_verify(const std::string& suite) {
    CheckList list;
    FinRayParams p;
    p.density = MeshDensity::Dense;
    p.mu = 0.7;
    const StructureModel dense = generate(p);

    if (suite == "all" || suite == "oracle") {
        const double length = 0.08;
        StructureModel cant;
        cant.nodes = {{0, 0.0, 0.0}, {1, length, 0.0}};
        cant.members = {make_member(cant.nodes, 0, 0, 1, p.youngs_e, p.area(), p.inertia())};
        cant.constraints = {0, 1, 2};
        const double delta = 0.8e-3;
        DisplacementLoadCase load;
        load.d_total = Eigen::VectorXd::Zero(6);
        load.d_total[4] = delta;
        load.f_ref = auto_reference_force(cant, load.d_total);
        SolverSettings settings;
        settings.n_inc = 10;
        const SolveResult res = displacement_control(cant, load, settings);
        const double oracle = cantilever_oracle(p.youngs_e, p.inertia(), length, delta);
        const double rel = std::abs(res.contact_forces[4] / oracle - 1.0);
        list.check("oracle.cantilever", res.converged && rel <= 0.01,
                   "estimated " + fmt(res.contact_forces[4]) + " N vs " + fmt(oracle) +
                       " N (rel " + fmt(rel) + ")");
    }
    if (suite == "all" || suite == "tangent") {
        const double at_rest = fd_tangent_check(dense, Eigen::VectorXd::Zero(dense.n_dofs()), 1e-7);
        list.check("tangent.rest", at_rest <= 1e-3,
                   "max relative column error " + fmt(at_rest));
        DisplacementLoadCase load;
        load.d_total = Eigen::VectorXd::Zero(dense.n_dofs());
        load.d_total[dense.dof_index(5, DofKind::X)] = 6e-3;
        load.f_ref = auto_reference_force(dense, load.d_total);
        const SolveResult res = displacement_control(dense, load, SolverSettings{});
        const double deformed = res.converged ? fd_tangent_check(dense, res.u, 1e-7) : 1.0;
        list.check("tangent.deformed", res.converged && deformed <= 1e-3,
                   "max relative column error " + fmt(deformed) + " at the 6 mm node-5 state");
    }
    if (suite == "all" || suite == "roundtrip") {
        DisplacementLoadCase load;
        load.d_total = Eigen::VectorXd::Zero(dense.n_dofs());
        load.d_total[dense.dof_index(5, DofKind::X)] = 6e-3;
        load.f_ref = auto_reference_force(dense, load.d_total);
        const RoundTripResult rt = round_trip(dense, load, SolverSettings{});
        const double err = rt.na ? 100.0 : std::abs(rt.entries[0].error_pct);
        list.check("roundtrip.node5_6mm", !rt.na && err <= 0.5,
                   rt.na ? rt.na_reason : "displacement discrepancy " + fmt(err) + "%");
    }
    std::cout << (list.failed ? "FAILED" : "OK") << " (" << list.failed << " failing checks)\n";
    return list.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finbeam - co-rotational 2D beam solver for fin-ray compliant fingers"};
    app.require_subcommand(1);

    // mesh
    auto* mesh = app.add_subcommand("mesh", "generate a fin-ray structure file");
    FinRayParams params;
    std::string density = "sparse", mesh_out;
    double mu = -1.0;
    mesh->add_option("--density", density, "sparse or dense")
        ->check(CLI::IsMember({"sparse", "dense"}));
    mesh->add_option("--mu", mu, "node radius modification factor (default 1.0/0.5 by density)");
    mesh->add_option("--width", params.width_m, "base width m [m]");
    mesh->add_option("--height", params.height_n, "height n [m]");
    mesh->add_option("--r-node", params.r_node, "connection node radius [m]");
    mesh->add_option("--section-b", params.section_b, "cross-section width b [m]");
    mesh->add_option("--section-h", params.section_h, "cross-section thickness h [m]");
    mesh->add_option("--youngs", params.youngs_e, "Young's modulus [Pa]");
    mesh->add_option("--crossbeams", params.crossbeam_count, "crossbeam count");
    mesh->add_option("--out", mesh_out, "output structure file")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run one scenario config");
    std::string config_path;
    solve->add_option("config", config_path, "scenario config file")->required();

    // study
    auto* study = app.add_subcommand("study", "run a named scenario grid");
    std::string study_name, study_out;
    StudyOptions study_opts;
    study->add_option("name", study_name,
                      "mesh-density | radius-factor | table2 | table3 | table4")
        ->required();
    study->add_option("--out", study_out, "output directory (default out/<name>)");
    study->add_option("--mu", study_opts.mu, "node radius factor for the table grids");
    study->add_option("--n-inc", study_opts.n_inc, "increments per solve");
    study->add_option("--tol", study_opts.tolerance, "residual tolerance [N]");
    study->add_option("--workers", study_opts.workers, "worker threads (0 = hardware)");

    // verify
    auto* verify = app.add_subcommand("verify", "run the built-in verification checks");
    std::string suite = "all";
    verify->add_option("--suite", suite, "all | tangent | roundtrip | oracle")
        ->check(CLI::IsMember({"all", "tangent", "roundtrip", "oracle"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (mesh->parsed()) {
            params.density = density == "dense" ? finbeam::MeshDensity::Dense
                                                : finbeam::MeshDensity::Sparse;
            params.mu = mu;
            return cmd_mesh(params, mesh_out);
        }
        if (solve->parsed()) {
            const finbeam::ScenarioConfig cfg = finbeam::parse_scenario(config_path);
            return finbeam::run_scenario(cfg);
        }
        if (study->parsed()) {
            study_opts.out_dir = study_out;
            return finbeam::run_study(study_name, study_opts);
        }
        if (verify->parsed()) return cmd_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
