#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

#include <json.hpp>

#include "finbeam/finray.hpp"
#include "finbeam/scenario.hpp"
#include "finbeam/verify.hpp"

namespace finbeam {

struct StudyOptions {
    std::string out_dir;      ///< empty = "out/<study name>"
    double mu = 0.7;          ///< node radius factor for the force-estimation grids
    int n_inc = 100;
    double tolerance = 1e-3;
    int maxiter = 100;
    int workers = 0;          ///< 0 = hardware concurrency
};

namespace detail {

struct StudyCell {
    std::string variant;  ///< model variant label, e.g. "dense mu=0.7"
    double mu = 0.0;
    std::shared_ptr<const StructureModel> model;
    std::vector<std::pair<int, double>> loads;  ///< (contact node, displacement mm)
    std::string group;
    std::string level;
};

inline std::string join_nodes(const std::vector<std::pair<int, double>>& loads) {
    std::string s;
    for (size_t k = 0; k < loads.size(); ++k) {
        if (k) s += '+';
        s += std::to_string(loads[k].first);
    }
    return s;
}

inline std::string join_levels(const std::vector<std::pair<int, double>>& loads) {
    std::string s = "(";
    for (size_t k = 0; k < loads.size(); ++k) {
        if (k) s += ',';
        s += csv_num(loads[k].second);
    }
    return s + ")";
}

inline RoundTripResult run_cell(const StudyCell& cell, const StudyOptions& opts) {
    const StructureModel& model = *cell.model;
    DisplacementLoadCase load;
    load.d_total = Eigen::VectorXd::Zero(model.n_dofs());
    for (const auto& [node, mm] : cell.loads)
        load.d_total[3 * node] = mm * 1e-3;  // horizontal loads
    load.f_ref = auto_reference_force(model, load.d_total);
    SolverSettings settings;
    settings.tolerance = opts.tolerance;
    settings.maxiter = opts.maxiter;
    settings.n_inc = opts.n_inc;
    return round_trip(model, load, settings);
}

inline std::vector<StudyCell> single_node_grid(const std::string& variant, double mu,
                                               std::shared_ptr<const StructureModel> model) {
    std::vector<StudyCell> cells;
    for (int node = 1; node <= 9; ++node)
        for (double mm : {2.0, 4.0, 6.0, 8.0, 10.0}) {
            StudyCell c{variant, mu, model, {{node, mm}}, "", ""};
            c.group = "node " + std::to_string(node);
            c.level = join_levels(c.loads);
            cells.push_back(std::move(c));
        }
    return cells;
}

inline std::vector<StudyCell> build_cells(const std::string& name, const StudyOptions& opts) {
    auto dense_model = [&](double mu) {
        FinRayParams p;
        p.density = MeshDensity::Dense;
        p.mu = mu;
        return std::make_shared<const StructureModel>(generate(p));
    };
    std::vector<StudyCell> cells;
    if (name == "table2") {
        return single_node_grid("dense mu=" + csv_num(opts.mu), opts.mu, dense_model(opts.mu));
    }
    if (name == "table3" || name == "table4") {
        const auto model = dense_model(opts.mu);
        const std::string variant = "dense mu=" + csv_num(opts.mu);
        auto add = [&](const std::vector<int>& nodes, const std::vector<double>& mms) {
            StudyCell c{variant, opts.mu, model, {}, "", ""};
            for (size_t k = 0; k < nodes.size(); ++k) c.loads.emplace_back(nodes[k], mms[k]);
            c.group = join_nodes(c.loads);
            c.level = join_levels(c.loads);
            cells.push_back(std::move(c));
        };
        if (name == "table3") {
            for (auto pair : {std::pair{2, 3}, {4, 5}, {6, 7}, {8, 9}})
                for (double mm : {2.0, 4.0, 6.0, 8.0, 10.0})
                    add({pair.first, pair.second}, {mm, mm});
            for (auto pair : {std::pair{2, 8}, {4, 7}})
                for (auto mm : {std::pair{2.0, 10.0}, {4.0, 8.0}, {6.0, 6.0}, {8.0, 4.0},
                                {10.0, 2.0}})
                    add({pair.first, pair.second}, {mm.first, mm.second});
        } else {
            for (auto tri : {std::array{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})
                for (double mm : {2.0, 4.0, 6.0, 8.0, 10.0})
                    add({tri[0], tri[1], tri[2]}, {mm, mm, mm});
            for (auto tri : {std::array{2, 5, 8}, {3, 5, 7}})
                for (auto mm : {std::array{2.0, 6.0, 10.0}, {4.0, 6.0, 8.0}, {6.0, 6.0, 6.0},
                                {8.0, 6.0, 4.0}, {10.0, 6.0, 2.0}})
                    add({tri[0], tri[1], tri[2]}, {mm[0], mm[1], mm[2]});
        }
        return cells;
    }
    if (name == "mesh-density") {
        FinRayParams sparse;  // Table-defaults: sparse mu=1, dense mu=0.5
        sparse.density = MeshDensity::Sparse;
        const auto sparse_model = std::make_shared<const StructureModel>(generate(sparse));
        for (auto& c : single_node_grid("sparse mu=1", 1.0, sparse_model)) cells.push_back(c);
        for (auto& c : single_node_grid("dense mu=0.5", 0.5, dense_model(0.5))) cells.push_back(c);
        return cells;
    }
    if (name == "radius-factor") {
        for (double mu : {0.7, 0.6, 0.5})
            for (auto& c : single_node_grid("dense mu=" + csv_num(mu), mu, dense_model(mu)))
                cells.push_back(c);
        return cells;
    }
    throw std::invalid_argument("unknown study '" + name +
                                "' (expected mesh-density, radius-factor, table2, table3, table4)");
}

}  // namespace detail

/**
 * @brief Expand a named study grid, round-trip every cell, write report files.
 *
 * Studies: table2 (single-node), table3 (two-node), table4 (three-node),
 * mesh-density (sparse vs dense single-node), radius-factor (mu 0.7/0.6/0.5).
 * Cells run concurrently; failed cells become N.A. rows and the run
 * continues. Writes report.csv (one row per cell) and summary.json
 * (per-group / per-level / overall absolute-error averages, N.A. excluded).
 */
inline int run_study(const std::string& name, const StudyOptions& opts,
                     std::ostream& log = std::cout) {
    const std::vector<detail::StudyCell> cells = detail::build_cells(name, opts);
    std::vector<RoundTripResult> results(cells.size());

    unsigned workers = opts.workers > 0 ? static_cast<unsigned>(opts.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
            results[i] = detail::run_cell(cells[i], opts);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::string out_dir = opts.out_dir.empty() ? "out/" + name : opts.out_dir;
    if (const char* env = std::getenv("FINBEAM_OUT_DIR"); env && *env) out_dir = env;
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    // Per-variant error reports feed both artifacts.
    std::map<std::string, ErrorReport> reports;
    for (size_t i = 0; i < cells.size(); ++i) {
        ErrorReport::Cell c;
        c.group = cells[i].group;
        c.level = cells[i].level;
        c.na = results[i].na;
        c.na_reason = results[i].na_reason;
        for (const RoundTripEntry& e : results[i].entries) {
            c.errors_pct.push_back(e.error_pct);
            c.forces.push_back(e.force);
        }
        reports[cells[i].variant].cells.push_back(std::move(c));
    }

    std::ofstream csv(fs::path(out_dir) / "report.csv");
    csv << "model,mu,nodes,dis_mm,status,na_reason,err1_pct,err2_pct,err3_pct,avg_abs_pct,"
           "force1_N,force2_N,force3_N\n";
    int na_count = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        const auto& r = results[i];
        na_count += r.na ? 1 : 0;
        std::array<std::string, 3> errs, forces;
        for (size_t k = 0; k < 3; ++k) {
            errs[k] = k < r.entries.size() && !r.na ? detail::csv_num(r.entries[k].error_pct) : "";
            forces[k] = k < r.entries.size() && !r.na ? detail::csv_num(r.entries[k].force) : "";
        }
        csv << cell.variant.substr(0, cell.variant.find(' ')) << ',' << detail::csv_num(cell.mu)
            << ',' << cell.group << ",\"" << cell.level << "\"," << (r.na ? "na" : "ok")
            << ",\"" << r.na_reason << "\"," << errs[0] << ',' << errs[1] << ',' << errs[2]
            << ',' << (r.na ? "" : detail::csv_num(r.avg_abs_error_pct())) << ',' << forces[0]
            << ',' << forces[1] << ',' << forces[2] << '\n';
    }
    csv.close();

    nlohmann::json j;
    j["study"] = name;
    j["cells"] = cells.size();
    j["na_cells"] = na_count;
    nlohmann::json variants = nlohmann::json::object();
    for (const auto& [variant, report] : reports) {
        nlohmann::json v;
        v["overall_avg_abs_pct"] = report.overall();
        v["per_group_avg_abs_pct"] = report.per_group();
        v["per_level_avg_abs_pct"] = report.per_level();
        nlohmann::json na_list = nlohmann::json::array();
        for (const auto& c : report.cells)
            if (c.na) na_list.push_back(c.group + " " + c.level + ": " + c.na_reason);
        v["na"] = std::move(na_list);
        variants[variant] = std::move(v);
    }
    j["variants"] = std::move(variants);
    std::ofstream js(fs::path(out_dir) / "summary.json");
    js << j.dump(2) << '\n';

    log << "study " << name << ": " << cells.size() << " cells, " << na_count
        << " N.A.; report in " << out_dir << "\n";
    return 0;
}

}  // namespace finbeam
