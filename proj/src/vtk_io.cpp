#include "trm/vtk_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trm/error.hpp"
#include "trm/topology.hpp"

namespace trm {

namespace {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Hull loop -> domain polygon: keep vertices where the boundary turns.
std::vector<Vec2> reconstruct_domain(const Mesh& m) {
    // gather hull edges a->b oriented so the element lies on the left
    std::vector<std::pair<int, int>> hedges;
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            std::array<int, 2> es{};
            if (m.edge_elems(a, b, es) == 1) hedges.push_back({a, b});
        }
    }
    if (hedges.empty()) throw Error("vtk import: mesh has no hull");
    std::vector<int> succ(m.n_nodes(), -1);
    for (auto& [a, b] : hedges) succ[a] = b;
    // walk the loop from the lowest hull node
    int start = hedges[0].first;
    for (auto& [a, b] : hedges) start = std::min(start, a);
    std::vector<int> loop;
    int cur = start;
    do {
        loop.push_back(cur);
        cur = succ[cur];
        if (cur < 0 || loop.size() > hedges.size() + 1)
            throw Error("vtk import: hull is not a single closed loop");
    } while (cur != start);

    std::vector<Vec2> poly;
    int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& p = m.pos[loop[(i - 1 + n) % n]];
        const Vec2& q = m.pos[loop[i]];
        const Vec2& r = m.pos[loop[(i + 1) % n]];
        Vec2 u = normalized(q - p), v = normalized(r - q);
        if (dot(u, v) < 1.0 - 1e-8 || std::abs(cross(u, v)) > 1e-8)
            poly.push_back(q);
    }
    if (poly.size() < 3) throw Error("vtk import: degenerate domain polygon");
    if (polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
    return poly;
}

} // namespace

void write_vtk(const std::string& path, const Mesh& m,
               const std::vector<double>& rho_by_surf, const VtkMeta& meta) {
    for (auto a : m.node_alive)
        if (!a) throw Error("vtk export requires a compact mesh");
    for (auto a : m.elem_alive)
        if (!a) throw Error("vtk export requires a compact mesh");

    std::ofstream os(path);
    if (!os) throw Error("cannot open for writing: " + path);

    os << "# vtk DataFile Version 3.0\n";
    os << "trm t=" << fmt_g17(meta.time) << " step=" << meta.step << "\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

    int nn = m.n_nodes(), ne = m.n_elems();
    os << "POINTS " << nn << " double\n";
    for (int n = 0; n < nn; ++n)
        os << fmt_g17(m.pos[n].x) << " " << fmt_g17(m.pos[n].y) << " 0\n";

    os << "CELLS " << ne << " " << 4 * ne << "\n";
    for (int e = 0; e < ne; ++e)
        os << "3 " << m.tri[e][0] << " " << m.tri[e][1] << " " << m.tri[e][2] << "\n";

    os << "CELL_TYPES " << ne << "\n";
    for (int e = 0; e < ne; ++e) os << "5\n";

    os << "CELL_DATA " << ne << "\n";
    os << "SCALARS surface_id int 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) os << m.surf[e] << "\n";
    os << "SCALARS dislocation_density double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) {
        int s = m.surf[e];
        double r = (s >= 0 && s < static_cast<int>(rho_by_surf.size())) ? rho_by_surf[s] : 0.0;
        os << fmt_g17(r) << "\n";
    }

    os << "POINT_DATA " << nn << "\n";
    os << "SCALARS node_class int 1\nLOOKUP_TABLE default\n";
    for (int n = 0; n < nn; ++n) {
        int c = static_cast<int>(m.kind[n]);
        if (m.kind[n] == NodeKind::Junction && m.corner[n]) c = 3;
        os << c << "\n";
    }
    if (!os) throw Error("write failed: " + path);
}

Mesh read_vtk(const std::string& path, VtkMeta* meta, std::vector<double>* rho_by_surf) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open: " + path);

    std::string line;
    if (!std::getline(is, line) || line.rfind("# vtk DataFile", 0) != 0)
        throw Error("not a legacy vtk file: " + path);
    std::getline(is, line);  // title, may carry "t=... step=..."
    if (meta) {
        *meta = {};
        std::istringstream ts(line);
        std::string tok;
        while (ts >> tok) {
            if (tok.rfind("t=", 0) == 0) meta->time = std::stod(tok.substr(2));
            if (tok.rfind("step=", 0) == 0) meta->step = std::stol(tok.substr(5));
        }
    }
    std::getline(is, line);
    if (line.rfind("ASCII", 0) != 0) throw Error("vtk import: only ASCII supported");

    Mesh m;
    std::vector<double> cell_rho;
    std::string tok;
    int nn = 0, ne = 0, section_count = 0;
    while (is >> tok) {
        if (tok == "DATASET") {
            is >> tok;
            if (tok != "UNSTRUCTURED_GRID") throw Error("vtk import: dataset must be UNSTRUCTURED_GRID");
        } else if (tok == "POINTS") {
            std::string ty;
            is >> nn >> ty;
            for (int i = 0; i < nn; ++i) {
                double x, y, z;
                if (!(is >> x >> y >> z)) throw Error("vtk import: truncated POINTS");
                m.add_node({x, y});
            }
        } else if (tok == "CELLS") {
            long total;
            is >> ne >> total;
            m.tri.reserve(ne);
            for (int i = 0; i < ne; ++i) {
                int k, a, b, c;
                if (!(is >> k)) throw Error("vtk import: truncated CELLS");
                if (k != 3) throw Error("vtk import: only triangle cells supported");
                is >> a >> b >> c;
                m.add_element(a, b, c, 0);
            }
        } else if (tok == "CELL_TYPES") {
            int cnt;
            is >> cnt;
            for (int i = 0; i < cnt; ++i) {
                int ty;
                is >> ty;
                if (ty != 5) throw Error("vtk import: only VTK_TRIANGLE cells supported");
            }
        } else if (tok == "CELL_DATA" || tok == "POINT_DATA") {
            int cnt;
            is >> cnt;
            section_count = cnt;
        } else if (tok == "SCALARS") {
            std::string name, ty;
            is >> name >> ty;
            std::string next;
            is >> next;  // component count or LOOKUP_TABLE
            if (next != "LOOKUP_TABLE") is >> next;  // consume LOOKUP_TABLE
            is >> next;                              // table name
            if (name == "surface_id") {
                for (int e = 0; e < ne; ++e) {
                    int s;
                    is >> s;
                    m.surf[e] = s;
                    if (s >= m.next_surf) m.next_surf = s + 1;
                }
            } else if (name == "dislocation_density") {
                cell_rho.resize(ne);
                for (int e = 0; e < ne; ++e) is >> cell_rho[e];
            } else {
                double v;
                for (int i = 0; i < section_count; ++i) is >> v;
            }
        }
    }
    if (nn == 0 || ne == 0) throw Error("vtk import: no mesh in file");

    m.domain = reconstruct_domain(m);
    classify_nodes(m);

    if (rho_by_surf) {
        rho_by_surf->assign(m.next_surf, 0.0);
        for (int e = 0; e < ne; ++e)
            if (e < static_cast<int>(cell_rho.size())) (*rho_by_surf)[m.surf[e]] = cell_rho[e];
    }
    return m;
}

} // namespace trm
