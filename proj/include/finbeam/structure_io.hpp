#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "finbeam/model.hpp"

namespace finbeam {

/// Parse failure with a file/line anchor in the message.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, int line, const std::string& what)
        : std::runtime_error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

namespace detail {

/// Shortest-exact formatting: parses back to the identical double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline double parse_double(const std::string& tok, const std::string& where, int line) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(where, line, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(where, line, "trailing junk in number '" + tok + "'");
    return v;
}

inline int parse_int(const std::string& tok, const std::string& where, int line) {
    size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(where, line, "expected an integer, got '" + tok + "'");
    }
    if (used != tok.size())
        throw ParseError(where, line, "trailing junk in integer '" + tok + "'");
    return v;
}

}  // namespace detail

/**
 * Structure-file schema (plain text, '#' comments):
 *
 *   [nodes]
 *   # id  x0  y0
 *   [members]
 *   # id  node_i  node_j  E  A  I  [rm]
 *   [constraints]
 *   # node  dof        dof in {x, y, rot}
 *
 * Member L0_eff and beta0 are recomputed from coordinates and rm, so a write
 * followed by a read reproduces the model exactly.
 */
inline void write_structure(const StructureModel& model, std::ostream& os) {
    os << "# finbeam structure file\n";
    os << "[nodes]\n# id x0 y0\n";
    for (const Node& n : model.nodes)
        os << n.id << ' ' << detail::format_double(n.x0) << ' ' << detail::format_double(n.y0)
           << '\n';
    os << "[members]\n# id node_i node_j E A I rm\n";
    for (const Member& m : model.members)
        os << m.id << ' ' << m.node_i << ' ' << m.node_j << ' ' << detail::format_double(m.E)
           << ' ' << detail::format_double(m.A) << ' ' << detail::format_double(m.I) << ' '
           << detail::format_double(m.rm) << '\n';
    os << "[constraints]\n# node dof\n";
    for (int d : model.constraints)
        os << d / 3 << ' ' << dof_kind_name(static_cast<DofKind>(d % 3)) << '\n';
}

inline void write_structure_file(const StructureModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_structure(model, os);
}

inline StructureModel read_structure(std::istream& is, const std::string& where = "<stream>") {
    StructureModel model;
    std::string section;
    std::string raw;
    int lineno = 0;
    struct PendingMember {
        int id, i, j;
        double e, a, ii, rm;
        int line;
    };
    std::vector<PendingMember> pending;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = detail::strip_comment(raw);
        const auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks[0].front() == '[') {
            if (toks.size() != 1 || toks[0].back() != ']')
                throw ParseError(where, lineno, "malformed section header");
            section = toks[0].substr(1, toks[0].size() - 2);
            if (section != "nodes" && section != "members" && section != "constraints")
                throw ParseError(where, lineno, "unknown section '" + section + "'");
            continue;
        }
        if (section == "nodes") {
            if (toks.size() != 3) throw ParseError(where, lineno, "node row needs: id x0 y0");
            Node n;
            n.id = detail::parse_int(toks[0], where, lineno);
            n.x0 = detail::parse_double(toks[1], where, lineno);
            n.y0 = detail::parse_double(toks[2], where, lineno);
            if (n.id != static_cast<int>(model.nodes.size()))
                throw ParseError(where, lineno, "node ids must be contiguous from 0");
            model.nodes.push_back(n);
        } else if (section == "members") {
            if (toks.size() != 6 && toks.size() != 7)
                throw ParseError(where, lineno, "member row needs: id node_i node_j E A I [rm]");
            PendingMember p;
            p.id = detail::parse_int(toks[0], where, lineno);
            p.i = detail::parse_int(toks[1], where, lineno);
            p.j = detail::parse_int(toks[2], where, lineno);
            p.e = detail::parse_double(toks[3], where, lineno);
            p.a = detail::parse_double(toks[4], where, lineno);
            p.ii = detail::parse_double(toks[5], where, lineno);
            p.rm = toks.size() == 7 ? detail::parse_double(toks[6], where, lineno) : 0.0;
            p.line = lineno;
            if (p.id != static_cast<int>(pending.size()))
                throw ParseError(where, lineno, "member ids must be contiguous from 0");
            pending.push_back(p);
        } else if (section == "constraints") {
            if (toks.size() != 2) throw ParseError(where, lineno, "constraint row needs: node dof");
            const int node = detail::parse_int(toks[0], where, lineno);
            int kind = -1;
            if (toks[1] == "x") kind = 0;
            else if (toks[1] == "y") kind = 1;
            else if (toks[1] == "rot") kind = 2;
            else throw ParseError(where, lineno, "dof must be one of x, y, rot");
            model.constraints.push_back(3 * node + kind);
        } else {
            throw ParseError(where, lineno, "data before any section header");
        }
    }
    for (const auto& p : pending) {
        try {
            model.members.push_back(
                make_member(model.nodes, p.id, p.i, p.j, p.e, p.a, p.ii, p.rm));
        } catch (const std::exception& e) {
            throw ParseError(where, p.line, e.what());
        }
    }
    std::sort(model.constraints.begin(), model.constraints.end());
    model.constraints.erase(std::unique(model.constraints.begin(), model.constraints.end()),
                            model.constraints.end());
    return model;
}

inline StructureModel read_structure_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open structure file '" + path + "'");
    return read_structure(is, path);
}

}  // namespace finbeam
