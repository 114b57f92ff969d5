#pragma once

#include <string>
#include <vector>

#include "finbeam/element.hpp"
#include "finbeam/model.hpp"

namespace finbeam {

enum class MeshDensity { Sparse, Dense };

inline const char* density_name(MeshDensity d) {
    return d == MeshDensity::Sparse ? "sparse" : "dense";
}

/**
 * @brief Parameters of a fin-ray finger model.
 *
 * Defaults reproduce the reference finger: 40 x 80 mm triangle, 0.75 mm
 * connection nodes, 20 x 1 mm cross section, E = 20 MPa. mu < 0 selects the
 * density-specific default factor (1.0 sparse, 0.5 dense); force-estimation
 * scenarios typically override it to 0.7.
 */
struct FinRayParams {
    double width_m = 40e-3;   ///< base width m [m]
    double height_n = 80e-3;  ///< height n [m]
    MeshDensity density = MeshDensity::Sparse;
    double r_node = 0.75e-3;  ///< connection node radius [m]
    double mu = -1.0;         ///< node radius modification factor; <0 = default
    double section_b = 20e-3; ///< cross-section width b [m]
    double section_h = 1e-3;  ///< cross-section thickness h [m]
    double youngs_e = 2e7;    ///< Young's modulus [Pa]
    int crossbeam_count = 10; ///< crossbeams (and nodes per beam)

    double area() const { return section_b * section_h; }
    double inertia() const { return section_b * section_h * section_h * section_h / 12.0; }
    double mu_value() const {
        if (mu >= 0.0) return mu;
        return density == MeshDensity::Sparse ? 1.0 : 0.5;
    }
};

/**
 * @brief Generate the meshed finger.
 *
 * Geometry: the front (contact) beam runs vertically from (0,0) to (0,n) with
 * `crossbeam_count` equally spaced nodes; the rear beam follows the straight
 * line from (m,0) toward (0,n), its nodes at fractions k/crossbeam_count of
 * that line, so the topmost crossbeam closes the triangle by joining the rear
 * top node to the front tip. Every crossbeam joins equal-index front/rear
 * nodes through a midpoint node with two elements; the pair at height 0 is
 * the base crossbeam.
 *
 * Node numbering: front 0..cb-1 (base to tip), rear cb..2cb-1, crossbeam
 * midnodes 2cb..3cb-1; the dense mesh appends one midpoint node per element
 * (base crossbeam excepted) in member order. With crossbeam_count = 10 this
 * yields 30 nodes / 38 members sparse and 66 / 74 dense.
 *
 * Supports: both base corner nodes and the base-crossbeam midnode are fully
 * clamped. Every member carries rm = mu * r_node.
 */
inline StructureModel generate(const FinRayParams& p) {
    if (!(p.width_m > 0.0) || !(p.height_n > 0.0) || !(p.r_node > 0.0) ||
        !(p.section_b > 0.0) || !(p.section_h > 0.0) || !(p.youngs_e > 0.0) ||
        p.crossbeam_count < 3)
        throw std::invalid_argument("fin-ray generation: invalid parameters");
    const int cb = p.crossbeam_count;
    const double m = p.width_m;
    const double n = p.height_n;
    const double rm = p.mu_value() * p.r_node;
    const double area = p.area();
    const double inertia = p.inertia();

    StructureModel model;
    for (int k = 0; k < cb; ++k)
        model.nodes.push_back({k, 0.0, n * k / (cb - 1)});
    for (int k = 0; k < cb; ++k) {
        const double t = static_cast<double>(k) / cb;
        model.nodes.push_back({cb + k, m * (1.0 - t), n * t});
    }
    for (int k = 0; k < cb; ++k) {
        const Node& f = model.nodes[k];
        const Node& r = model.nodes[cb + k];
        model.nodes.push_back({2 * cb + k, 0.5 * (f.x0 + r.x0), 0.5 * (f.y0 + r.y0)});
    }

    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k + 1 < cb; ++k) pairs.emplace_back(k, k + 1);                // front
    for (int k = 0; k + 1 < cb; ++k) pairs.emplace_back(cb + k, cb + k + 1);      // rear
    int base_first = -1;
    for (int k = 0; k < cb; ++k) {                                                // crossbeams
        if (k == 0) base_first = static_cast<int>(pairs.size());
        pairs.emplace_back(k, 2 * cb + k);
        pairs.emplace_back(2 * cb + k, cb + k);
    }

    if (p.density == MeshDensity::Dense) {
        std::vector<std::pair<int, int>> refined;
        for (size_t idx = 0; idx < pairs.size(); ++idx) {
            const auto [i, j] = pairs[idx];
            const bool base_elem =
                static_cast<int>(idx) == base_first || static_cast<int>(idx) == base_first + 1;
            if (base_elem) {
                refined.emplace_back(i, j);
                continue;
            }
            const int mid = static_cast<int>(model.nodes.size());
            model.nodes.push_back({mid, 0.5 * (model.nodes[i].x0 + model.nodes[j].x0),
                                   0.5 * (model.nodes[i].y0 + model.nodes[j].y0)});
            refined.emplace_back(i, mid);
            refined.emplace_back(mid, j);
        }
        pairs = std::move(refined);
    }

    model.members.reserve(pairs.size());
    for (size_t idx = 0; idx < pairs.size(); ++idx) {
        try {
            model.members.push_back(make_member(model.nodes, static_cast<int>(idx),
                                                pairs[idx].first, pairs[idx].second,
                                                p.youngs_e, area, inertia, rm));
        } catch (const std::domain_error& e) {
            throw std::invalid_argument(std::string("fin-ray generation failed: ") + e.what());
        }
    }

    for (int nid : {0, cb, 2 * cb})
        for (int k = 0; k < 3; ++k) model.constraints.push_back(3 * nid + k);
    std::sort(model.constraints.begin(), model.constraints.end());
    return model;
}

/**
 * @brief The loadable physical front-beam nodes, ordered base to tip.
 *
 * Recovered structurally: node 0 must sit at the origin fully clamped, and
 * ids 1, 2, ... must continue up the x = 0 line with uniform spacing and no
 * constraints. Models that do not show this fin-ray signature are rejected.
 */
inline std::vector<int> contact_node_ids(const StructureModel& model) {
    auto reject = []() -> std::vector<int> {
        throw std::invalid_argument("contact_node_ids: not a fin-ray model");
    };
    if (model.n_nodes() < 4) return reject();
    const Node& base = model.nodes[0];
    if (std::abs(base.x0) > 1e-12 || std::abs(base.y0) > 1e-12) return reject();
    for (int k = 0; k < 3; ++k)
        if (!model.is_fixed(k)) return reject();
    const double dy = model.nodes[1].y0;
    if (!(dy > 0.0) || std::abs(model.nodes[1].x0) > 1e-12) return reject();
    std::vector<int> ids;
    for (int k = 1; k < model.n_nodes(); ++k) {
        const Node& nd = model.nodes[k];
        if (std::abs(nd.x0) > 1e-12 || std::abs(nd.y0 - k * dy) > 1e-9 * k * dy) break;
        for (int d = 0; d < 3; ++d)
            if (model.is_fixed(3 * k + d)) return reject();
        ids.push_back(k);
    }
    if (ids.size() < 2) return reject();
    return ids;
}

}  // namespace finbeam
