#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "finbeam/finray.hpp"
#include "finbeam/solver.hpp"
#include "finbeam/structure_io.hpp"

namespace finbeam {

/**
 * Scenario config schema (plain text, '#' comments):
 *
 *   [model]            key = value section
 *     source = finray | file
 *     path = model.fbm             (source = file; relative to the config)
 *     density = sparse | dense     (default dense)
 *     mu = 0.7                     (default 0.7 for force-estimation runs)
 *     width_m, height_n, r_node, section_b, section_h, youngs_e, crossbeams
 *   [displacements]    rows: node dx_mm [dy_mm]   (loads in mm, x by default)
 *   [forces]           rows: node fx_N fy_N       (alternative load mode)
 *   [solver]           tolerance, maxiter, n_inc, f_ref (= auto or Newtons)
 *   [output]           dir = path   (FINBEAM_OUT_DIR env var overrides)
 */
struct ScenarioConfig {
    enum class LoadMode { Displacement, Force };
    struct LoadRow {
        int node = 0;
        double ax = 0.0;  ///< mm (displacement mode) or N (force mode)
        double ay = 0.0;
        int line = 0;
    };

    bool from_file = false;
    std::string model_path;
    FinRayParams finray;
    LoadMode mode = LoadMode::Displacement;
    std::vector<LoadRow> loads;
    SolverSettings settings;
    double f_ref0 = 0.0;  ///< 0 = auto scaling
    std::string out_dir = "out";
    std::string config_path;  ///< where this config was parsed from
};

namespace detail {

inline std::pair<std::string, std::string> parse_kv(const std::string& line,
                                                    const std::string& where, int lineno) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ParseError(where, lineno, "expected 'key = value'");
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario config '" + path + "'");
    ScenarioConfig cfg;
    cfg.config_path = path;
    cfg.finray.density = MeshDensity::Dense;
    cfg.finray.mu = 0.7;
    std::string section, raw;
    int lineno = 0;
    bool saw_disp = false, saw_force = false;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = detail::strip_comment(raw);
        const auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks[0].front() == '[') {
            if (toks.size() != 1 || toks[0].back() != ']')
                throw ParseError(path, lineno, "malformed section header");
            section = toks[0].substr(1, toks[0].size() - 2);
            if (section != "model" && section != "displacements" && section != "forces" &&
                section != "solver" && section != "output")
                throw ParseError(path, lineno, "unknown section '" + section + "'");
            if (section == "displacements") saw_disp = true;
            if (section == "forces") saw_force = true;
            continue;
        }
        if (section == "model") {
            const auto [key, value] = detail::parse_kv(line, path, lineno);
            if (key == "source") {
                if (value == "finray") cfg.from_file = false;
                else if (value == "file") cfg.from_file = true;
                else throw ParseError(path, lineno, "source must be finray or file");
            } else if (key == "path") cfg.model_path = value;
            else if (key == "density") {
                if (value == "sparse") cfg.finray.density = MeshDensity::Sparse;
                else if (value == "dense") cfg.finray.density = MeshDensity::Dense;
                else throw ParseError(path, lineno, "density must be sparse or dense");
            } else if (key == "mu") cfg.finray.mu = detail::parse_double(value, path, lineno);
            else if (key == "width_m") cfg.finray.width_m = detail::parse_double(value, path, lineno);
            else if (key == "height_n") cfg.finray.height_n = detail::parse_double(value, path, lineno);
            else if (key == "r_node") cfg.finray.r_node = detail::parse_double(value, path, lineno);
            else if (key == "section_b") cfg.finray.section_b = detail::parse_double(value, path, lineno);
            else if (key == "section_h") cfg.finray.section_h = detail::parse_double(value, path, lineno);
            else if (key == "youngs_e") cfg.finray.youngs_e = detail::parse_double(value, path, lineno);
            else if (key == "crossbeams") cfg.finray.crossbeam_count = detail::parse_int(value, path, lineno);
            else throw ParseError(path, lineno, "unknown model key '" + key + "'");
        } else if (section == "displacements" || section == "forces") {
            if (toks.size() < 2 || toks.size() > 3)
                throw ParseError(path, lineno,
                                 section == "displacements" ? "row needs: node dx_mm [dy_mm]"
                                                            : "row needs: node fx_N [fy_N]");
            ScenarioConfig::LoadRow row;
            row.node = detail::parse_int(toks[0], path, lineno);
            row.ax = detail::parse_double(toks[1], path, lineno);
            row.ay = toks.size() == 3 ? detail::parse_double(toks[2], path, lineno) : 0.0;
            row.line = lineno;
            cfg.loads.push_back(row);
            cfg.mode = section == "displacements" ? ScenarioConfig::LoadMode::Displacement
                                                  : ScenarioConfig::LoadMode::Force;
        } else if (section == "solver") {
            const auto [key, value] = detail::parse_kv(line, path, lineno);
            if (key == "tolerance") cfg.settings.tolerance = detail::parse_double(value, path, lineno);
            else if (key == "maxiter") cfg.settings.maxiter = detail::parse_int(value, path, lineno);
            else if (key == "n_inc") cfg.settings.n_inc = detail::parse_int(value, path, lineno);
            else if (key == "f_ref") {
                if (value == "auto") cfg.f_ref0 = 0.0;
                else cfg.f_ref0 = detail::parse_double(value, path, lineno);
            } else throw ParseError(path, lineno, "unknown solver key '" + key + "'");
        } else if (section == "output") {
            const auto [key, value] = detail::parse_kv(line, path, lineno);
            if (key == "dir") cfg.out_dir = value;
            else throw ParseError(path, lineno, "unknown output key '" + key + "'");
        } else {
            throw ParseError(path, lineno, "data before any section header");
        }
    }
    if (saw_disp && saw_force)
        throw ParseError(path, lineno, "a scenario takes [displacements] or [forces], not both");
    if (cfg.loads.empty())
        throw ParseError(path, lineno, "no loads given ([displacements] or [forces] section)");
    if (cfg.from_file && cfg.model_path.empty())
        throw ParseError(path, lineno, "source = file requires a path key");
    return cfg;
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Controlled/loaded DOF list with config-level validation.
inline std::vector<std::pair<int, double>> scenario_dofs(const StructureModel& model,
                                                         const ScenarioConfig& cfg) {
    std::vector<int> contact;
    bool finray_like = true;
    try {
        contact = contact_node_ids(model);
    } catch (const std::invalid_argument&) {
        finray_like = false;
    }
    std::vector<std::pair<int, double>> dofs;
    const bool disp = cfg.mode == ScenarioConfig::LoadMode::Displacement;
    for (const auto& row : cfg.loads) {
        if (row.node < 0 || row.node >= model.n_nodes())
            throw ParseError(cfg.config_path, row.line,
                             "node " + std::to_string(row.node) + " does not exist");
        if (disp && finray_like &&
            std::find(contact.begin(), contact.end(), row.node) == contact.end())
            throw ParseError(cfg.config_path, row.line,
                             "node " + std::to_string(row.node) +
                                 " is not a loadable physical contact node");
        const double sx = disp ? row.ax * 1e-3 : row.ax;  // mm -> m at the boundary
        const double sy = disp ? row.ay * 1e-3 : row.ay;
        for (const auto& [kind, val] :
             {std::pair<DofKind, double>{DofKind::X, sx}, {DofKind::Y, sy}}) {
            if (val == 0.0) continue;
            const int d = model.dof_index(row.node, kind);
            if (model.is_fixed(d))
                throw ParseError(cfg.config_path, row.line,
                                 "node " + std::to_string(row.node) + " dof " +
                                     dof_kind_name(kind) + " is constrained");
            dofs.emplace_back(d, val);
        }
    }
    if (dofs.empty())
        throw ParseError(cfg.config_path, cfg.loads.front().line, "all load components are zero");
    return dofs;
}

inline void write_forces_csv(const std::string& path, const StructureModel&,
                             const std::vector<std::pair<int, double>>& dofs,
                             const SolveResult& res, bool displacement_mode) {
    std::ofstream os(path);
    if (displacement_mode) {
        os << "node,dof,imposed_mm,force_N\n";
        for (const auto& [d, val] : dofs)
            os << d / 3 << ',' << dof_kind_name(static_cast<DofKind>(d % 3)) << ','
               << csv_num(val * 1e3) << ',' << csv_num(res.contact_forces[d]) << '\n';
    } else {
        os << "node,dof,applied_N,displacement_mm\n";
        for (const auto& [d, val] : dofs)
            os << d / 3 << ',' << dof_kind_name(static_cast<DofKind>(d % 3)) << ','
               << csv_num(val) << ',' << csv_num(res.u[d] * 1e3) << '\n';
    }
}

inline void write_deformation_csv(const std::string& path, const StructureModel& model,
                                  const SolveResult& res) {
    std::ofstream os(path);
    os << "node,x0,y0,x,y\n";
    for (const Node& n : model.nodes)
        os << n.id << ',' << csv_num(n.x0) << ',' << csv_num(n.y0) << ','
           << csv_num(n.x0 + res.u[3 * n.id]) << ',' << csv_num(n.y0 + res.u[3 * n.id + 1])
           << '\n';
}

inline void write_trace_json(const std::string& path, const ScenarioConfig& cfg,
                             const SolveResult& res) {
    nlohmann::json j;
    j["mode"] = cfg.mode == ScenarioConfig::LoadMode::Displacement ? "displacement" : "force";
    j["converged"] = res.converged;
    j["failure"] = res.failure;
    j["solver"] = {{"tolerance", cfg.settings.tolerance},
                   {"maxiter", cfg.settings.maxiter},
                   {"n_inc", cfg.settings.n_inc}};
    nlohmann::json incs = nlohmann::json::array();
    for (const IncrementRecord& r : res.trace)
        incs.push_back({{"increment", r.increment}, {"iterations", r.iterations}, {"rho", r.rho}});
    j["increments"] = std::move(incs);
    std::ofstream os(path);
    os << j.dump(2) << '\n';
}

}  // namespace detail

/**
 * @brief Run one scenario: build the model, solve, write artifacts.
 *
 * Writes forces.csv, deformation.csv and trace.json into the output
 * directory. Returns 0 on convergence, 2 when the solver flags the run
 * (artifacts are still written); configuration problems throw before any
 * artifact exists.
 */
inline int run_scenario(const ScenarioConfig& cfg, std::ostream& log = std::cout) {
    StructureModel model;
    if (cfg.from_file) {
        namespace fs = std::filesystem;
        fs::path p = cfg.model_path;
        if (p.is_relative() && !cfg.config_path.empty())
            p = fs::path(cfg.config_path).parent_path() / p;
        model = read_structure_file(p.string());
    } else {
        model = generate(cfg.finray);
    }
    const auto defects = validate(model);
    if (!defects.empty())
        throw std::invalid_argument("scenario model is invalid: " + defects.front());

    const auto dofs = detail::scenario_dofs(model, cfg);

    std::string out_dir = cfg.out_dir;
    if (const char* env = std::getenv("FINBEAM_OUT_DIR"); env && *env) out_dir = env;
    std::filesystem::create_directories(out_dir);

    SolveResult res;
    const bool disp = cfg.mode == ScenarioConfig::LoadMode::Displacement;
    if (disp) {
        DisplacementLoadCase load;
        load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
        for (const auto& [d, val] : dofs) load.d_total[d] = val;
        load.f_ref = auto_reference_force(model, load.d_total, cfg.f_ref0);
        res = displacement_control(model, load, cfg.settings);
    } else {
        Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(model.n_dofs());
        for (const auto& [d, val] : dofs) f_ext[d] = val;
        res = force_control(model, f_ext, cfg.settings);
    }

    namespace fs = std::filesystem;
    detail::write_forces_csv((fs::path(out_dir) / "forces.csv").string(), model, dofs, res, disp);
    detail::write_deformation_csv((fs::path(out_dir) / "deformation.csv").string(), model, res);
    detail::write_trace_json((fs::path(out_dir) / "trace.json").string(), cfg, res);

    if (!res.converged) {
        log << "solve did not converge: " << res.failure << " (artifacts in " << out_dir << ")\n";
        return 2;
    }
    log << "converged in " << res.trace.size() << " increments; artifacts in " << out_dir << "\n";
    return 0;
}

}  // namespace finbeam
