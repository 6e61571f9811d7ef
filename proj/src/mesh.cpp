#include "trm/mesh.hpp"

#include <algorithm>
#include <unordered_set>

#include "trm/error.hpp"

namespace trm {

int Mesh::add_node(const Vec2& p) {
    int id = n_nodes();
    pos.push_back(p);
    node_alive.push_back(1);
    kind.push_back(NodeKind::Bulk);
    hull.push_back(0);
    corner.push_back(0);
    star.emplace_back();
    return id;
}

int Mesh::add_element(int a, int b, int c, int s) {
    int id = n_elems();
    tri.push_back({a, b, c});
    surf.push_back(s);
    elem_alive.push_back(1);
    star[a].push_back(id);
    star[b].push_back(id);
    star[c].push_back(id);
    if (s >= next_surf) next_surf = s + 1;
    return id;
}

void Mesh::remove_element(int e) {
    if (!elem_alive[e]) return;
    elem_alive[e] = 0;
    for (int n : tri[e]) {
        auto& st = star[n];
        st.erase(std::remove(st.begin(), st.end(), e), st.end());
    }
}

void Mesh::remove_node(int n) {
    node_alive[n] = 0;
    star[n].clear();
}

int Mesh::count_alive_nodes() const {
    int c = 0;
    for (auto a : node_alive) c += a;
    return c;
}

int Mesh::count_alive_elems() const {
    int c = 0;
    for (auto a : elem_alive) c += a;
    return c;
}

int Mesh::opposite_node(int e, int a, int b) const {
    for (int n : tri[e])
        if (n != a && n != b) return n;
    return -1;
}

int Mesh::edge_elems(int a, int b, std::array<int, 2>& out) const {
    int cnt = 0;
    const auto& sa = star[a];
    for (int e : sa) {
        if (elem_has(e, b)) {
            if (cnt < 2) out[cnt] = e;
            ++cnt;
        }
    }
    return cnt;
}

bool Mesh::edge_surfs(int a, int b, int& s0, int& s1) const {
    std::array<int, 2> es{};
    int c = edge_elems(a, b, es);
    if (c == 0) return false;
    s0 = surf[es[0]];
    s1 = (c > 1) ? surf[es[1]] : kExterior;
    return true;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int e = 0; e < n_elems(); ++e)
        if (elem_alive[e]) a += area(e);
    return a;
}

int Mesh::wall_of_point(const Vec2& p, double tol) const {
    double t2 = tol * tol;
    int m = static_cast<int>(domain.size());
    for (int i = 0; i < m; ++i)
        if (dist2(p, domain[i]) <= t2) return -2;
    for (int i = 0; i < m; ++i)
        if (point_segment_dist2(p, domain[i], domain[(i + 1) % m]) <= t2) return i;
    return -1;
}

int Mesh::wall_of(int n, double tol) const { return wall_of_point(pos[n], tol); }

void Mesh::relabel_node(int e, int from, int to) {
    for (int& n : tri[e])
        if (n == from) n = to;
    auto& sf = star[from];
    sf.erase(std::remove(sf.begin(), sf.end(), e), sf.end());
    star[to].push_back(e);
}

void Mesh::compact(std::vector<int>& surf_map) {
    std::vector<int> node_map(pos.size(), -1);
    int nn = 0;
    for (int n = 0; n < n_nodes(); ++n)
        if (node_alive[n]) node_map[n] = nn++;
    for (int n = 0; n < n_nodes(); ++n) {
        if (node_map[n] < 0) continue;
        int d = node_map[n];
        pos[d] = pos[n];
        node_alive[d] = 1;
        kind[d] = kind[n];
        hull[d] = hull[n];
        corner[d] = corner[n];
    }
    pos.resize(nn);
    node_alive.assign(nn, 1);
    kind.resize(nn);
    hull.resize(nn);
    corner.resize(nn);

    surf_map.assign(next_surf, -1);
    int ns = 0;
    for (int e = 0; e < n_elems(); ++e)
        if (elem_alive[e] && surf_map[surf[e]] < 0) surf_map[surf[e]] = ns++;

    int ne = 0;
    std::vector<std::array<int, 3>> tri2;
    std::vector<int> surf2;
    tri2.reserve(tri.size());
    surf2.reserve(surf.size());
    for (int e = 0; e < n_elems(); ++e) {
        if (!elem_alive[e]) continue;
        const auto& t = tri[e];
        tri2.push_back({node_map[t[0]], node_map[t[1]], node_map[t[2]]});
        surf2.push_back(surf_map[surf[e]]);
        ++ne;
    }
    tri = std::move(tri2);
    surf = std::move(surf2);
    elem_alive.assign(ne, 1);
    next_surf = ns;

    star.assign(nn, {});
    for (int e = 0; e < ne; ++e)
        for (int n : tri[e]) star[n].push_back(e);
}

NodeKind expected_kind(const Mesh& m, int n, bool& on_hull, bool& is_corner) {
    // Count incident edges whose two sides differ (hull edges count: the
    // outside is a pseudo-surface). 0 such edges = interior of a grain,
    // 2 = regular boundary point, 3+ = junction. Degree-based counting also
    // catches grains touching themselves at a single node, where the number
    // of distinct neighbouring surfaces alone would undercount.
    on_hull = false;
    int degree = 0;
    std::unordered_set<int> seen;
    for (int e : m.star[n]) {
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a != n && b != n) continue;
            int other = (a == n) ? b : a;
            if (!seen.insert(other).second) continue;
            std::array<int, 2> es{};
            int c = m.edge_elems(n, other, es);
            if (c == 1) {
                on_hull = true;
                ++degree;
            } else if (c == 2 && m.surf[es[0]] != m.surf[es[1]]) {
                ++degree;
            }
        }
    }
    double tol = 1e-9 * std::sqrt(std::abs(m.domain_area()) + 1.0);
    is_corner = false;
    if (on_hull) {
        for (const Vec2& v : m.domain)
            if (dist2(v, m.pos[n]) <= tol * tol) { is_corner = true; break; }
    }
    if (is_corner) return NodeKind::Junction;
    if (degree == 0) return NodeKind::Bulk;
    if (degree == 2) return NodeKind::Interface;
    return NodeKind::Junction;
}

void classify_node(Mesh& m, int n) {
    if (!m.node_alive[n]) return;
    bool on_hull = false, is_corner = false;
    m.kind[n] = expected_kind(m, n, on_hull, is_corner);
    m.hull[n] = on_hull ? 1 : 0;
    m.corner[n] = is_corner ? 1 : 0;
}

void classify_nodes(Mesh& m) {
    for (int n = 0; n < m.n_nodes(); ++n)
        if (m.node_alive[n]) classify_node(m, n);
}

} // namespace trm
