#include "trm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trm/error.hpp"

namespace trm {

namespace {

struct IEdge {
    int a, b;                 // a < b
    int line = -1;            // assigned line id
};

// Per-node incident interface edge list, edges sorted by partner node id.
struct IGraph {
    std::vector<IEdge> edges;
    std::vector<std::vector<int>> at;  // node -> edge indices

    int other(int ei, int n) const { return edges[ei].a == n ? edges[ei].b : edges[ei].a; }
};

IGraph build_interface_graph(const Mesh& m) {
    IGraph g;
    g.at.assign(m.n_nodes(), {});
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            std::array<int, 2> es{};
            int c = m.edge_elems(a, b, es);
            // visit each edge once, from its lowest-id incident element
            int owner = (c == 2) ? std::min(es[0], es[1]) : es[0];
            if (owner != e) continue;
            bool iface = (c == 1) || (m.surf[es[0]] != m.surf[es[1]]);
            if (!iface) continue;
            int ei = static_cast<int>(g.edges.size());
            g.edges.push_back({std::min(a, b), std::max(a, b), -1});
            g.at[a].push_back(ei);
            g.at[b].push_back(ei);
        }
    }
    for (int n = 0; n < m.n_nodes(); ++n)
        std::sort(g.at[n].begin(), g.at[n].end(),
                  [&](int x, int y) { return g.other(x, n) < g.other(y, n); });
    return g;
}

// Left/right surface of directed edge a->b; kExterior on a missing side.
void side_surfs(const Mesh& m, int a, int b, int& left, int& right) {
    std::array<int, 2> es{};
    int c = m.edge_elems(a, b, es);
    left = right = kExterior;
    for (int i = 0; i < c; ++i) {
        int e = es[i];
        int o = m.opposite_node(e, a, b);
        double s = tri_area2(m.pos[a], m.pos[b], m.pos[o]);
        if (s > 0.0)
            left = m.surf[e];
        else
            right = m.surf[e];
    }
}

} // namespace

Topology identify(const Mesh& m) {
    Topology topo;
    topo.node_point.assign(m.n_nodes(), -1);
    topo.node_line.assign(m.n_nodes(), -1);

    // surfaces from element buckets
    topo.surf_index.assign(std::max(1, m.next_surf), -1);
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        int s = m.surf[e];
        if (s < 0) throw InvariantError("element without surface id");
        if (topo.surf_index[s] < 0) {
            topo.surf_index[s] = static_cast<int>(topo.surfaces.size());
            topo.surfaces.push_back({});
            topo.surfaces.back().id = s;
        }
        Surface& sf = topo.surfaces[topo.surf_index[s]];
        sf.elems.push_back(e);
        sf.area += m.area(e);
    }

    IGraph g = build_interface_graph(m);

    // sanity of the stored classification against interface-edge counts
    for (int n = 0; n < m.n_nodes(); ++n) {
        if (!m.node_alive[n]) continue;
        size_t deg = g.at[n].size();
        switch (m.kind[n]) {
            case NodeKind::Bulk:
                if (deg != 0) throw InvariantError("bulk node with interface edges: node " + std::to_string(n));
                break;
            case NodeKind::Interface:
                if (deg != 2) throw InvariantError("interface node with degree != 2: node " + std::to_string(n));
                break;
            case NodeKind::Junction:
                if (deg < 2) throw InvariantError("junction node with degree < 2: node " + std::to_string(n));
                break;
        }
    }

    // points, one per junction node, in node id order
    for (int n = 0; n < m.n_nodes(); ++n) {
        if (m.node_alive[n] && m.kind[n] == NodeKind::Junction) {
            topo.node_point[n] = static_cast<int>(topo.points.size());
            topo.points.push_back({});
            topo.points.back().node = n;
        }
    }

    auto walk = [&](int start, int first_edge) {
        Line ln;
        ln.id = static_cast<int>(topo.lines.size());
        ln.nodes.push_back(start);
        int prev = start;
        int cur = g.other(first_edge, start);
        g.edges[first_edge].line = ln.id;
        while (true) {
            ln.nodes.push_back(cur);
            if (m.kind[cur] == NodeKind::Junction || cur == start) break;
            int next_edge = -1;
            for (int ei : g.at[cur])
                if (g.other(ei, cur) != prev) { next_edge = ei; break; }
            if (next_edge < 0) throw InvariantError("open boundary path: node " + std::to_string(cur));
            g.edges[next_edge].line = ln.id;
            prev = cur;
            cur = g.other(next_edge, cur);
        }
        return ln;
    };

    // open lines start at junctions
    for (const Point& pt : topo.points) {
        int n = pt.node;
        for (int ei : g.at[n]) {
            if (g.edges[ei].line >= 0) continue;
            Line ln = walk(n, ei);
            if (ln.nodes.back() == n && m.kind[n] != NodeKind::Junction)
                throw InvariantError("line walk failed");
            topo.lines.push_back(std::move(ln));
        }
    }

    // leftover edges form closed loops of interface nodes; anchor = lowest id
    while (true) {
        int anchor = -1;
        for (const IEdge& e : g.edges)
            if (e.line < 0) { anchor = std::min(e.a, e.b); break; }
        if (anchor < 0) break;
        for (const IEdge& e : g.edges) {
            if (e.line < 0) {
                anchor = std::min(anchor, std::min(e.a, e.b));
            }
        }
        int first_edge = -1;
        for (int ei : g.at[anchor])
            if (g.edges[ei].line < 0) { first_edge = ei; break; }
        Line ln = walk(anchor, first_edge);
        if (ln.nodes.back() != anchor)
            throw InvariantError("closed line walk did not return to anchor");
        ln.nodes.pop_back();
        ln.closed = true;
        topo.lines.push_back(std::move(ln));
    }

    // per-line geometry, side surfaces, endpoint registration
    for (Line& ln : topo.lines) {
        size_t nseg = ln.closed ? ln.nodes.size() : ln.nodes.size() - 1;
        side_surfs(m, ln.nodes[0], ln.nodes[1 % ln.nodes.size()], ln.surf_left, ln.surf_right);
        ln.length = 0.0;
        for (size_t i = 0; i < nseg; ++i) {
            int a = ln.nodes[i], b = ln.nodes[(i + 1) % ln.nodes.size()];
            ln.length += dist(m.pos[a], m.pos[b]);
            int l, r;
            side_surfs(m, a, b, l, r);
            if (l != ln.surf_left || r != ln.surf_right)
                throw InvariantError("line changes side surfaces mid-path: line " + std::to_string(ln.id));
        }
        if (ln.surf_left == ln.surf_right)
            throw InvariantError("line with equal side surfaces: line " + std::to_string(ln.id));
        if (!ln.closed) {
            ln.p0 = topo.node_point[ln.nodes.front()];
            ln.p1 = topo.node_point[ln.nodes.back()];
            if (ln.p0 < 0 || ln.p1 < 0)
                throw InvariantError("open line not ending at a junction: line " + std::to_string(ln.id));
            topo.points[ln.p0].lines.push_back(ln.id);
            topo.points[ln.p0].neighbors.push_back(ln.nodes[1]);
            topo.points[ln.p1].lines.push_back(ln.id);
            topo.points[ln.p1].neighbors.push_back(ln.nodes[ln.nodes.size() - 2]);
        } else {
            for (int n : ln.nodes) topo.node_line[n] = ln.id;
        }
        for (size_t i = 0; i < ln.nodes.size(); ++i) {
            int n = ln.nodes[i];
            if (m.kind[n] == NodeKind::Interface) topo.node_line[n] = ln.id;
        }
    }

    // CCW ordering of incident lines around each point
    for (Point& pt : topo.points) {
        std::vector<int> idx(pt.lines.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        const Vec2 c = m.pos[pt.node];
        std::sort(idx.begin(), idx.end(), [&](int i, int j) {
            Vec2 di = m.pos[pt.neighbors[i]] - c;
            Vec2 dj = m.pos[pt.neighbors[j]] - c;
            double ai = std::atan2(di.y, di.x), aj = std::atan2(dj.y, dj.x);
            if (ai != aj) return ai < aj;
            return pt.lines[i] < pt.lines[j];
        });
        std::vector<int> l2(idx.size()), nb2(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) {
            l2[i] = pt.lines[idx[i]];
            nb2[i] = pt.neighbors[idx[i]];
        }
        pt.lines = std::move(l2);
        pt.neighbors = std::move(nb2);
    }

    // delimiting lines/points and perimeter per surface
    for (const Line& ln : topo.lines) {
        for (int s : {ln.surf_left, ln.surf_right}) {
            if (s == kExterior) continue;
            Surface& sf = topo.surfaces[topo.surf_index[s]];
            sf.lines.push_back(ln.id);
            if (!ln.exterior()) sf.perimeter += ln.length;
            for (int p : {ln.p0, ln.p1})
                if (p >= 0 && (sf.points.empty() || std::find(sf.points.begin(), sf.points.end(), p) == sf.points.end()))
                    sf.points.push_back(p);
        }
    }

    return topo;
}

std::vector<int> flood_elements(
    const Mesh& m, int seed,
    const std::function<bool(int, int, int, int)>& blocked) {
    std::vector<int> out;
    std::vector<int> stack{seed};
    std::vector<char> seen(m.n_elems(), 0);
    seen[seed] = 1;
    while (!stack.empty()) {
        int e = stack.back();
        stack.pop_back();
        out.push_back(e);
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            std::array<int, 2> es{};
            int c = m.edge_elems(a, b, es);
            for (int i = 0; i < c; ++i) {
                int f = es[i];
                if (f == e || seen[f]) continue;
                if (blocked(e, f, a, b)) continue;
                seen[f] = 1;
                stack.push_back(f);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> surface_components(const Mesh& m, int s) {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(m.n_elems(), 0);
    for (int e0 = 0; e0 < m.n_elems(); ++e0) {
        if (!m.elem_alive[e0] || m.surf[e0] != s || seen[e0]) continue;
        auto comp = flood_elements(m, e0, [&](int, int eb, int, int) {
            return m.surf[eb] != s;
        });
        for (int e : comp) seen[e] = 1;
        comps.push_back(std::move(comp));
    }
    return comps;
}

std::string ValidationReport::str() const {
    std::ostringstream os;
    for (const auto& v : violations)
        os << v.what << " [id " << v.id << "]\n";
    return os.str();
}

ValidationReport validate(const Mesh& m) {
    ValidationReport rep;
    auto add = [&](const std::string& w, int id) { rep.violations.push_back({w, id}); };

    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        const auto& t = m.tri[e];
        bool bad = false;
        for (int n : t) {
            if (n < 0 || n >= m.n_nodes() || !m.node_alive[n]) {
                add("element references dead or missing node", e);
                bad = true;
            }
        }
        if (bad) continue;
        if (m.area(e) <= 0.0) add("element with non-positive area", e);
        if (m.surf[e] < 0) add("element without surface id", e);
    }

    for (int n = 0; n < m.n_nodes(); ++n) {
        if (!m.node_alive[n]) continue;
        if (m.star[n].empty()) {
            add("orphan node", n);
            continue;
        }
        for (int e : m.star[n])
            if (!m.elem_alive[e] || !m.elem_has(e, n))
                add("stale incidence entry", n);
        bool on_hull = false, is_corner = false;
        NodeKind want = expected_kind(m, n, on_hull, is_corner);
        if (want != m.kind[n]) add("stored classification disagrees with adjacency", n);
        if ((m.hull[n] != 0) != on_hull) add("stale hull flag", n);
        if ((m.corner[n] != 0) != is_corner) add("stale corner flag", n);
    }

    if (!rep.ok()) return rep;  // wireframe checks need a sane mesh

    double total = m.total_area();
    double dom = m.domain_area();
    if (dom > 0.0 && std::abs(total - dom) > 1e-9 * dom)
        add("surface areas do not partition the domain", -1);

    Topology topo;
    try {
        topo = identify(m);
    } catch (const Error& err) {
        add(std::string("identification failed: ") + err.what(), -1);
        return rep;
    }

    for (const Line& ln : topo.lines) {
        size_t nseg = ln.closed ? ln.nodes.size() : ln.nodes.size() - 1;
        for (size_t i = 0; i < nseg; ++i) {
            int a = ln.nodes[i], b = ln.nodes[(i + 1) % ln.nodes.size()];
            std::array<int, 2> es{};
            if (m.edge_elems(a, b, es) == 0)
                add("line nodes not joined by a mesh edge", ln.id);
        }
        if (ln.closed && ln.nodes.size() < 3)
            add("closed line with fewer than 3 nodes", ln.id);
    }

    for (size_t p = 0; p < topo.points.size(); ++p) {
        const Point& pt = topo.points[p];
        for (int li : pt.lines) {
            const Line& ln = topo.lines[li];
            if (ln.p0 != static_cast<int>(p) && ln.p1 != static_cast<int>(p))
                add("point/line registration asymmetric", pt.node);
        }
    }

    return rep;
}

} // namespace trm
