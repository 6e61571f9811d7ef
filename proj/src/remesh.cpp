#include "trm/remesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "trm/error.hpp"
#include "trm/topology.hpp"

namespace trm {

void RemeshConfig::check() const {
    if (!(h > 0)) throw Error("remesh: h must be positive");
    if (!(min_factor > 0 && min_factor < 1)) throw Error("remesh: min factor must be in (0,1)");
    if (!(max_factor > 1)) throw Error("remesh: max factor must exceed 1");
    if (!(pp_factor > 0 && pp_factor < junction_arm))
        throw Error("remesh: junction-edge collapse factor must stay below the junction arm");
    if (!(smooth_relax > 0 && smooth_relax <= 1)) throw Error("remesh: relaxation must be in (0,1]");
    if (max_halvings < 1) throw Error("remesh: halving cap must be at least 1");
}

std::string event_kind_name(Event::Kind k) {
    switch (k) {
        case Event::Kind::GrainDisappear: return "grain_disappear";
        case Event::Kind::GrainSplit: return "grain_split";
        case Event::Kind::JunctionCreate: return "junction_create";
        case Event::Kind::JunctionDecompose: return "junction_decompose";
        case Event::Kind::LineSplit: return "line_split";
        case Event::Kind::Nucleate: return "nucleate";
    }
    return "unknown";
}

namespace {

constexpr double kAreaEps = 1e-12;  // scaled by h^2 where used

// collapse precedence: the higher rank survives
int node_rank(const Mesh& m, int n) {
    if (m.corner[n]) return 5;
    bool jn = m.kind[n] == NodeKind::Junction;
    if (m.hull[n]) return jn ? 4 : 3;
    if (jn) return 2;
    return m.kind[n] == NodeKind::Interface ? 1 : 0;
}

std::vector<int> node_neighbors(const Mesh& m, int n) {
    std::vector<int> out;
    for (int e : m.star[n])
        for (int x : m.tri[e])
            if (x != n) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// area of element e pretending that nodes src/tgt sit at p
double sim_area(const Mesh& m, int e, int src, int tgt, const Vec2& p) {
    Vec2 q[3];
    const auto& t = m.tri[e];
    for (int k = 0; k < 3; ++k)
        q[k] = (t[k] == src || t[k] == tgt) ? p : m.pos[t[k]];
    return tri_area(q[0], q[1], q[2]);
}

int wall_index(const Mesh& m, int n) {
    double tol = 1e-9 * std::sqrt(std::abs(m.domain_area()) + 1.0);
    return m.wall_of(n, tol);
}

Vec2 snap_to_wall(const Mesh& m, int w, const Vec2& p) {
    const Vec2& a = m.domain[w];
    const Vec2& b = m.domain[(w + 1) % m.domain.size()];
    Vec2 d = b - a;
    double t = dot(p - a, d) / norm2(d);
    t = std::min(1.0, std::max(0.0, t));
    return a + d * t;
}

bool star_valid_at(const Mesh& m, int n, const Vec2& p, double min_area) {
    for (int e : m.star[n])
        if (sim_area(m, e, n, n, p) <= min_area) return false;
    return true;
}

// Number of fans each surface forms around a prospective merged node: the
// element set is the union of the stars of the hub nodes minus `removed`,
// and two elements are fan-linked when they carry the same surface and share
// any vertex outside the hub (that vertex edge passes through the hub after
// the merge). A surface forming more than one fan may have been pinched
// apart. Pass one hub for an existing node, two for a pending merge.
std::vector<std::pair<int, int>> surf_fans(const Mesh& m, std::initializer_list<int> hubs,
                                           const std::vector<int>& removed) {
    std::vector<int> elems;
    for (int h : hubs)
        for (int e : m.star[h])
            if (std::find(removed.begin(), removed.end(), e) == removed.end())
                elems.push_back(e);
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

    auto is_hub = [&](int x) {
        for (int h : hubs)
            if (x == h) return true;
        return false;
    };
    const int k = static_cast<int>(elems.size());
    std::vector<int> root(k);
    for (int i = 0; i < k; ++i) root[i] = i;
    std::function<int(int)> find = [&](int i) {
        while (root[i] != i) i = root[i] = root[root[i]];
        return i;
    };
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (m.surf[elems[i]] != m.surf[elems[j]]) continue;
            bool linked = false;
            for (int x : m.tri[elems[i]])
                if (!is_hub(x) && m.elem_has(elems[j], x)) {
                    linked = true;
                    break;
                }
            if (linked) root[find(i)] = find(j);
        }
    std::vector<std::pair<int, int>> counts;  // (surf, fan count), sorted
    for (int i = 0; i < k; ++i) {
        if (find(i) != i) continue;
        int s = m.surf[elems[i]];
        bool found = false;
        for (auto& c : counts)
            if (c.first == s) {
                ++c.second;
                found = true;
            }
        if (!found) counts.push_back({s, 1});
    }
    std::sort(counts.begin(), counts.end());
    return counts;
}

int fan_count(const std::vector<std::pair<int, int>>& fans, int s) {
    for (const auto& f : fans)
        if (f.first == s) return f.second;
    return 0;
}

// Would surface s stay connected if `removed` were deleted? Read-only flood
// over the surviving elements of s starting from `seed`.
bool surf_connected_without(const Mesh& m, int s, const std::vector<int>& removed,
                            int n_total) {
    int seed = -1;
    std::vector<char> dead(m.n_elems(), 0);
    for (int e : removed) dead[e] = 1;
    for (int e = 0; e < m.n_elems() && seed < 0; ++e)
        if (m.elem_alive[e] && !dead[e] && m.surf[e] == s) seed = e;
    if (seed < 0) return true;  // nothing left: "connected" (disappearance)
    std::vector<char> vis(m.n_elems(), 0);
    std::vector<int> stack = {seed};
    vis[seed] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int e = stack.back();
        stack.pop_back();
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            std::array<int, 2> es{};
            int c = m.edge_elems(a, b, es);
            for (int i = 0; i < c && i < 2; ++i) {
                int o = es[i];
                if (o == e || vis[o] || dead[o] || m.surf[o] != s) continue;
                vis[o] = 1;
                ++cnt;
                stack.push_back(o);
            }
        }
    }
    return cnt == n_total;
}

int alive_count_of_surf(const Mesh& m, int s) {
    int c = 0;
    for (int e = 0; e < m.n_elems(); ++e)
        if (m.elem_alive[e] && m.surf[e] == s) ++c;
    return c;
}

struct SurfCounts {
    std::vector<int>* v = nullptr;
    const Mesh* m = nullptr;
    int get(int s) const {
        if (v) return s < static_cast<int>(v->size()) ? (*v)[s] : 0;
        return alive_count_of_surf(*m, s);
    }
    void add(int s, int d) {
        if (!v) return;
        if (s >= static_cast<int>(v->size())) v->resize(s + 1, 0);
        (*v)[s] += d;
    }
};

bool collapse_impl(Mesh& m, int a, int b, CollapseMode mode, const RemeshConfig& cfg,
                   double time, EventLog& events, RemeshStats& stats,
                   std::vector<double>* energy, SurfCounts counts) {
    if (a == b || !m.node_alive[a] || !m.node_alive[b]) return false;
    std::array<int, 2> es{};
    int cnt = m.edge_elems(a, b, es);
    if (cnt < 1 || cnt > 2) return false;

    bool line_edge = (cnt == 1) || (m.surf[es[0]] != m.surf[es[1]]);
    int ra = node_rank(m, a), rb = node_rank(m, b);

    if (!line_edge && std::min(ra, rb) > 0 && mode == CollapseMode::Strict) {
        ++stats.rejected_collapses;
        return false;  // non-consecutive boundary nodes: strict keeps them apart
    }
    if (ra == 5 && rb == 5) {
        ++stats.rejected_collapses;
        return false;  // two domain corners never merge
    }

    int src, tgt;
    Vec2 newpos;
    if (ra == rb) {
        tgt = std::min(a, b);
        src = std::max(a, b);
        newpos = (m.pos[a] + m.pos[b]) * 0.5;
        if (m.hull[a] || m.hull[b]) {
            int wa = wall_index(m, a), wb = wall_index(m, b);
            if (wa < 0 || wa != wb) {
                ++stats.rejected_collapses;
                return false;  // across-corner or off-wall merge
            }
            newpos = snap_to_wall(m, wa, newpos);
        }
    } else {
        tgt = (ra > rb) ? a : b;
        src = (ra > rb) ? b : a;
        newpos = m.pos[tgt];
    }

    std::vector<int> removed(es.begin(), es.begin() + cnt);

    // link condition: the only common neighbors of a and b may be the
    // opposite vertices of the removed elements, otherwise the merge would
    // double up edges.
    {
        std::vector<int> na = node_neighbors(m, a), nb = node_neighbors(m, b);
        std::vector<int> common;
        std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                              std::back_inserter(common));
        std::vector<int> opp;
        for (int e : removed) opp.push_back(m.opposite_node(e, a, b));
        std::sort(opp.begin(), opp.end());
        opp.erase(std::unique(opp.begin(), opp.end()), opp.end());
        if (common != opp) {
            ++stats.rejected_collapses;
            return false;
        }
    }

    // geometric validity of the merged star
    double min_area = kAreaEps * cfg.h * cfg.h;
    for (int n : {src, tgt}) {
        for (int e : m.star[n]) {
            if (std::find(removed.begin(), removed.end(), e) != removed.end()) continue;
            if (sim_area(m, e, src, tgt, newpos) <= min_area) {
                ++stats.rejected_collapses;
                return false;
            }
        }
    }

    // surfaces that lose elements; a surface losing its last element vanishes
    std::vector<int> touched_surfs;
    for (int e : removed) touched_surfs.push_back(m.surf[e]);
    std::sort(touched_surfs.begin(), touched_surfs.end());
    touched_surfs.erase(std::unique(touched_surfs.begin(), touched_surfs.end()),
                        touched_surfs.end());

    if (mode == CollapseMode::Strict) {
        // reject anything that would pinch a surviving surface apart; only
        // surfaces fanning more than once around the merged node can split
        auto fans = surf_fans(m, {a, b}, removed);
        for (int s : touched_surfs) {
            if (fan_count(fans, s) <= 1) continue;
            int lost = 0;
            for (int e : removed)
                if (m.surf[e] == s) ++lost;
            int remain = counts.get(s) - lost;
            if (remain > 0 && !surf_connected_without(m, s, removed, remain)) {
                ++stats.rejected_collapses;
                return false;
            }
        }
    }

    bool was_junction = m.kind[a] == NodeKind::Junction || m.kind[b] == NodeKind::Junction;

    // ---- commit ----
    for (int e : removed) {
        counts.add(m.surf[e], -1);
        m.remove_element(e);
    }
    std::vector<int> src_star = m.star[src];  // copy: relabel mutates it
    for (int e : src_star) m.relabel_node(e, src, tgt);
    m.remove_node(src);
    m.pos[tgt] = newpos;

    // reclassify the neighborhood (adjacency changed around the merge)
    classify_node(m, tgt);
    for (int x : node_neighbors(m, tgt)) classify_node(m, x);

    // splits: a removed surface may now be disconnected (cheap fan gate
    // first; every piece of a pinched surface still touches the merged node)
    auto fans_after = surf_fans(m, {tgt}, {});
    for (int s : touched_surfs) {
        if (counts.get(s) == 0) continue;
        if (fan_count(fans_after, s) <= 1) continue;
        auto comps = surface_components(m, s);
        if (comps.size() <= 1) continue;
        for (size_t c = 1; c < comps.size(); ++c) {
            int ns = m.alloc_surf();
            for (int e : comps[c]) {
                m.surf[e] = ns;
                counts.add(s, -1);
                counts.add(ns, 1);
            }
            if (energy) {
                double val = grain_energy(*energy, s);
                if (static_cast<int>(energy->size()) <= ns) energy->resize(ns + 1, 0.0);
                (*energy)[ns] = val;
            }
            events.push_back({Event::Kind::GrainSplit, time, s, ns});
            ++stats.grain_splits;
        }
        // class flags around the whole former surface may have changed
        std::unordered_set<int> nodes;
        for (const auto& comp : comps)
            for (int e : comp)
                for (int n : m.tri[e]) nodes.insert(n);
        std::vector<int> sorted_nodes(nodes.begin(), nodes.end());
        std::sort(sorted_nodes.begin(), sorted_nodes.end());
        for (int n : sorted_nodes) classify_node(m, n);
    }

    for (int s : touched_surfs) {
        if (counts.get(s) == 0) {
            events.push_back({Event::Kind::GrainDisappear, time, s, -1});
            ++stats.disappeared;
        }
    }

    if (!was_junction && m.kind[tgt] == NodeKind::Junction) {
        events.push_back({Event::Kind::JunctionCreate, time, tgt, -1});
        events.push_back({Event::Kind::LineSplit, time, tgt, -1});
    }

    ++stats.collapses;
    return true;
}

} // namespace

int advance_nodes(Mesh& m, const std::vector<Vec2>& vel, double dt,
                  const RemeshConfig& cfg) {
    double min_area = kAreaEps * cfg.h * cfg.h;
    int frozen = 0;
    for (int n = 0; n < m.n_nodes(); ++n) {
        if (!m.node_alive[n]) continue;
        Vec2 v = (n < static_cast<int>(vel.size())) ? vel[n] : Vec2{0, 0};
        if (v.x == 0 && v.y == 0) continue;
        if (m.corner[n]) continue;

        Vec2 d = v * dt;
        int w = -1;
        if (m.hull[n]) {
            w = wall_index(m, n);
            if (w < 0) continue;  // sitting on a corner: pinned
            Vec2 tw = normalized(m.domain[(w + 1) % m.domain.size()] - m.domain[w]);
            d = tw * dot(d, tw);
        }

        bool placed = false;
        for (int k = 0; k <= cfg.max_halvings; ++k) {
            Vec2 np = m.pos[n] + d;
            if (w >= 0) np = snap_to_wall(m, w, np);
            if (star_valid_at(m, n, np, min_area)) {
                m.pos[n] = np;
                placed = true;
                break;
            }
            d = d * 0.5;
        }
        if (!placed) ++frozen;
    }
    return frozen;
}

int smooth_pass(Mesh& m, const RemeshConfig& cfg) {
    double min_area = kAreaEps * cfg.h * cfg.h;
    int moved = 0;
    for (int n = 0; n < m.n_nodes(); ++n) {
        if (!m.node_alive[n] || m.star[n].empty()) continue;
        if (m.kind[n] == NodeKind::Junction || m.corner[n]) continue;

        Vec2 d{0, 0};
        if (m.kind[n] == NodeKind::Bulk) {
            auto nb = node_neighbors(m, n);
            if (nb.empty()) continue;
            Vec2 bary{0, 0};
            for (int x : nb) bary += m.pos[x];
            bary = bary / static_cast<double>(nb.size());
            d = (bary - m.pos[n]) * cfg.smooth_relax;
        } else {
            // boundary node: slide along the boundary only
            auto nb = node_neighbors(m, n);
            std::vector<int> wire;
            for (int x : nb)
                if (m.is_interface_edge(n, x)) wire.push_back(x);
            if (wire.size() != 2) continue;
            Vec2 p0 = m.pos[wire[0]], p1 = m.pos[wire[1]];
            Vec2 t = p1 - p0;
            double len = norm(t);
            if (!(len > 0)) continue;
            t = t / len;
            d = t * (dot((p0 + p1) * 0.5 - m.pos[n], t) * cfg.smooth_relax);
        }

        int w = -1;
        if (m.hull[n]) {
            w = wall_index(m, n);
            if (w < 0) continue;
            Vec2 tw = normalized(m.domain[(w + 1) % m.domain.size()] - m.domain[w]);
            d = tw * dot(d, tw);
        }
        if (d.x == 0 && d.y == 0) continue;
        Vec2 np = m.pos[n] + d;
        if (w >= 0) np = snap_to_wall(m, w, np);
        if (star_valid_at(m, n, np, min_area)) {
            m.pos[n] = np;
            ++moved;
        }
    }
    return moved;
}

bool split_edge_at(Mesh& m, int a, int b, const Vec2& p, int& new_node) {
    new_node = -1;
    std::array<int, 2> es{};
    int cnt = m.edge_elems(a, b, es);
    if (cnt < 1) return false;

    struct Child {
        int x, y, c, s;
    };
    std::vector<Child> plan;
    for (int i = 0; i < cnt; ++i) {
        int e = es[i];
        int c = m.opposite_node(e, a, b);
        const auto& t = m.tri[e];
        int ka = 0;
        while (t[ka] != a) ++ka;
        bool ab_order = t[(ka + 1) % 3] == b;  // cyclic a->b keeps CCW children
        int x = ab_order ? a : b;
        int y = ab_order ? b : a;
        if (tri_area(m.pos[x], p, m.pos[c]) <= 0 || tri_area(p, m.pos[y], m.pos[c]) <= 0)
            return false;
        plan.push_back({x, y, c, m.surf[e]});
    }

    new_node = m.add_node(p);
    for (int i = 0; i < cnt; ++i) {
        m.remove_element(es[i]);
        m.add_element(plan[i].x, new_node, plan[i].c, plan[i].s);
        m.add_element(new_node, plan[i].y, plan[i].c, plan[i].s);
    }
    classify_node(m, new_node);
    return true;
}

bool split_edge(Mesh& m, int a, int b, int& new_node) {
    return split_edge_at(m, a, b, (m.pos[a] + m.pos[b]) * 0.5, new_node);
}

bool swap_edge(Mesh& m, int a, int b, int* nc, int* nd) {
    std::array<int, 2> es{};
    if (m.edge_elems(a, b, es) != 2) return false;
    if (m.surf[es[0]] != m.surf[es[1]]) return false;

    int e1 = es[0], e2 = es[1];
    // orient so e1 holds a->b cyclically
    {
        const auto& t = m.tri[e1];
        int ka = 0;
        while (t[ka] != a) ++ka;
        if (t[(ka + 1) % 3] != b) std::swap(e1, e2);
    }
    int c = m.opposite_node(e1, a, b);
    int d = m.opposite_node(e2, a, b);
    if (c == d) return false;
    std::array<int, 2> tmp{};
    if (m.edge_elems(c, d, tmp) > 0) return false;  // diagonal already present

    double q_old = std::min(m.quality(e1), m.quality(e2));
    double a1 = tri_area(m.pos[c], m.pos[a], m.pos[d]);
    double a2 = tri_area(m.pos[d], m.pos[b], m.pos[c]);
    if (a1 <= 0 || a2 <= 0) return false;
    double q_new = std::min(tri_quality(m.pos[c], m.pos[a], m.pos[d]),
                            tri_quality(m.pos[d], m.pos[b], m.pos[c]));
    if (q_new <= q_old + 1e-12) return false;

    int s = m.surf[e1];
    m.remove_element(e1);
    m.remove_element(e2);
    m.add_element(c, a, d, s);
    m.add_element(d, b, c, s);
    if (nc) *nc = c;
    if (nd) *nd = d;
    return true;
}

bool collapse_edge(Mesh& m, int a, int b, CollapseMode mode, const RemeshConfig& cfg,
                   double time, EventLog& events, RemeshStats& stats,
                   std::vector<double>* energy) {
    SurfCounts counts;
    counts.m = &m;
    return collapse_impl(m, a, b, mode, cfg, time, events, stats, energy, counts);
}

namespace {

struct PairPlan {
    double score = 0.0;
    int line_key = -1;
    int node_a = -1, node_b = -1;  // mesh neighbors along the two lines
    double arm = 0.0;
    Vec2 satellite{0, 0};
    std::vector<int> fan;  // sector elements to re-home
    int flank1 = -1, flank2 = -1;
    bool ok = false;
};

// normalized wedge of element e at node n: returns (first, second) neighbor
// in CCW order around n
bool elem_wedge(const Mesh& m, int e, int n, int& x, int& y) {
    const auto& t = m.tri[e];
    int k = 0;
    while (k < 3 && t[k] != n) ++k;
    if (k == 3) return false;
    x = t[(k + 1) % 3];
    y = t[(k + 2) % 3];
    return true;
}

// walk the element fan at node n CCW from edge (n,a) to edge (n,b)
bool sector_fan(const Mesh& m, int n, int a, int b, std::vector<int>& fan, int& s) {
    fan.clear();
    int cur = -1;
    for (int e : m.star[n]) {
        int x, y;
        if (elem_wedge(m, e, n, x, y) && x == a) {
            cur = e;
            break;
        }
    }
    if (cur < 0) return false;
    s = m.surf[cur];
    int guard = static_cast<int>(m.star[n].size()) + 1;
    while (guard-- > 0) {
        int x, y;
        if (!elem_wedge(m, cur, n, x, y)) return false;
        if (m.surf[cur] != s) return false;  // sector must be one grain
        fan.push_back(cur);
        if (y == b) return true;
        int next = -1;
        for (int e : m.star[n]) {
            int x2, y2;
            if (e != cur && elem_wedge(m, e, n, x2, y2) && x2 == y) {
                next = e;
                break;
            }
        }
        if (next < 0) return false;
        cur = next;
    }
    return false;
}

PairPlan plan_detachment(const Mesh& m, const RemeshConfig& cfg,
                         const std::vector<double>& energy, double gamma, int n,
                         int na, int nb, int line_key) {
    PairPlan plan;
    plan.line_key = line_key;
    plan.node_a = na;
    plan.node_b = nb;

    std::vector<int> fan;
    int s = -1;
    if (!sector_fan(m, n, na, nb, fan, s)) return plan;

    // flanking surfaces: the far side of the boundary edges (n,na) and (n,nb)
    auto other_side = [&](int x) {
        std::array<int, 2> es{};
        int c = m.edge_elems(n, x, es);
        for (int i = 0; i < c; ++i)
            if (std::find(fan.begin(), fan.end(), es[i]) == fan.end())
                return m.surf[es[i]];
        return kExterior;
    };
    plan.flank1 = other_side(na);
    plan.flank2 = other_side(nb);
    if (plan.flank1 == kExterior || plan.flank2 == kExterior) return plan;

    Vec2 pa = m.pos[na] - m.pos[n];
    Vec2 pb = m.pos[nb] - m.pos[n];
    double ta = std::atan2(pa.y, pa.x);
    double tb = std::atan2(pb.y, pb.x);
    double dth = tb - ta;
    while (dth <= 0) dth += 2.0 * M_PI;
    double tm = ta + 0.5 * dth;

    double min_area = kAreaEps * cfg.h * cfg.h;
    double arm = cfg.junction_arm * cfg.h;
    // the satellite must stay well inside the first ring of the sector
    for (int tries = 0; tries < 6; ++tries, arm *= 0.5) {
        Vec2 p = m.pos[n] + Vec2{std::cos(tm), std::sin(tm)} * arm;
        bool good = true;
        for (int e : fan)
            if (sim_area(m, e, n, n, p) <= min_area) {
                good = false;
                break;
            }
        double a1 = tri_area(m.pos[n], m.pos[na], p);
        double a2 = tri_area(m.pos[n], p, m.pos[nb]);
        if (a1 <= min_area || a2 <= min_area) good = false;
        if (!good) continue;

        double dlen = dist(p, m.pos[na]) + dist(p, m.pos[nb]) + dist(p, m.pos[n]) -
                      dist(m.pos[n], m.pos[na]) - dist(m.pos[n], m.pos[nb]);
        double de = gamma * dlen + grain_energy(energy, plan.flank1) * a1 +
                    grain_energy(energy, plan.flank2) * a2 -
                    grain_energy(energy, s) * (a1 + a2);
        plan.arm = arm;
        plan.satellite = p;
        plan.fan = fan;
        plan.score = de;
        plan.ok = true;
        return plan;
    }
    return plan;
}

} // namespace

int split_junctions(Mesh& m, const RemeshConfig& cfg, const Kinetics& kin,
                    const std::vector<double>& energy, double time, EventLog& events) {
    int done = 0;
    for (int pass = 0; pass < 200; ++pass) {
        Topology topo = identify(m);
        int target = -1;
        for (const auto& pt : topo.points) {
            if (pt.lines.size() > 3) {
                target = pt.node;
                // pick the lowest node id with excess connections
                break;
            }
        }
        if (target < 0) return done;

        const Point& pt = *std::find_if(topo.points.begin(), topo.points.end(),
                                        [&](const Point& p) { return p.node == target; });
        size_t deg = pt.lines.size();
        PairPlan best;
        for (size_t k = 0; k < deg; ++k) {
            size_t k2 = (k + 1) % deg;
            const Line& l1 = topo.lines[pt.lines[k]];   // line id == index
            const Line& l2 = topo.lines[pt.lines[k2]];
            if (l1.exterior() || l2.exterior()) continue;
            int key = std::min(pt.lines[k], pt.lines[k2]);
            PairPlan p = plan_detachment(m, cfg, energy, kin.gamma, target,
                                         pt.neighbors[k], pt.neighbors[k2], key);
            if (!p.ok) continue;
            if (!best.ok || p.score < best.score ||
                (p.score == best.score && p.line_key < best.line_key))
                best = p;
        }
        if (!best.ok) return done;  // nothing feasible; give up on this pass

        int np = m.add_node(best.satellite);
        for (int e : best.fan) m.relabel_node(e, target, np);
        m.add_element(target, best.node_a, np, best.flank1);
        m.add_element(target, np, best.node_b, best.flank2);
        classify_node(m, target);
        classify_node(m, np);
        classify_node(m, best.node_a);
        classify_node(m, best.node_b);
        events.push_back({Event::Kind::JunctionDecompose, time, target, np});
        ++done;
    }
    return done;
}

namespace {

// Live triangles are positively oriented, so an interior edge appears in its
// two triangles with opposite directions: keeping directed edges with a < b
// lists every interior edge exactly once with no sorting. Wall edges belong
// to a single triangle and are appended when their one direction runs a > b
// (only hull-to-hull pairs can qualify, so the adjacency probe stays cheap).
std::vector<std::array<int, 2>> gather_edges(const Mesh& m) {
    std::vector<std::array<int, 2>> edges;
    edges.reserve(static_cast<size_t>(m.n_elems()) * 3 / 2);
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        const auto& t = m.tri[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a < b) {
                edges.push_back({a, b});
            } else if (m.hull[a] && m.hull[b]) {
                std::array<int, 2> es{};
                if (m.edge_elems(b, a, es) == 1) edges.push_back({b, a});
            }
        }
    }
    return edges;
}

} // namespace

RemeshStats remesh_pass(Mesh& m, const RemeshConfig& cfg, CollapseMode mode,
                        const Kinetics& kin, std::vector<double>& energy,
                        double time, EventLog& events) {
    cfg.check();
    RemeshStats stats;

    // 1. split long edges; a split leaves only its own two children as new
    //    candidates, so follow those directly instead of rescanning the mesh
    double max_len2 = cfg.max_factor * cfg.h * cfg.max_factor * cfg.h;
    {
        std::vector<std::array<int, 2>> work = gather_edges(m);
        for (int round = 0; round < 5 && !work.empty(); ++round) {
            std::vector<std::array<int, 2>> next;
            for (const auto& ed : work) {
                if (!m.node_alive[ed[0]] || !m.node_alive[ed[1]]) continue;
                if (dist2(m.pos[ed[0]], m.pos[ed[1]]) <= max_len2) continue;
                int nn;
                if (split_edge(m, ed[0], ed[1], nn)) {
                    ++stats.splits;
                    next.push_back({ed[0], nn});
                    next.push_back({nn, ed[1]});
                }
            }
            work = std::move(next);
        }
    }

    // 2. collapse short edges, shortest first
    std::vector<int> surf_count(m.next_surf, 0);
    for (int e = 0; e < m.n_elems(); ++e)
        if (m.elem_alive[e]) ++surf_count[m.surf[e]];
    SurfCounts counts;
    counts.v = &surf_count;
    counts.m = &m;

    double min_len = cfg.min_factor * cfg.h;
    double pp_len = cfg.pp_factor * cfg.h;
    for (int round = 0; round < 8; ++round) {
        struct Cand {
            double len2;
            int a, b;
        };
        std::vector<Cand> cands;
        for (const auto& ed : gather_edges(m)) {
            double l2 = dist2(m.pos[ed[0]], m.pos[ed[1]]);
            bool both_junction = m.kind[ed[0]] == NodeKind::Junction &&
                                 m.kind[ed[1]] == NodeKind::Junction;
            double lim = both_junction ? pp_len : min_len;
            if (l2 < lim * lim) cands.push_back({l2, ed[0], ed[1]});
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
            if (x.len2 != y.len2) return x.len2 < y.len2;
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });
        int changed = 0;
        for (const auto& c : cands) {
            if (!m.node_alive[c.a] || !m.node_alive[c.b]) continue;
            std::array<int, 2> es{};
            if (m.edge_elems(c.a, c.b, es) < 1) continue;
            // thresholds may have shifted after earlier merges
            double l2 = dist2(m.pos[c.a], m.pos[c.b]);
            bool both_junction = m.kind[c.a] == NodeKind::Junction &&
                                 m.kind[c.b] == NodeKind::Junction;
            double lim = both_junction ? pp_len : min_len;
            if (l2 >= lim * lim) continue;
            if (collapse_impl(m, c.a, c.b, mode, cfg, time, events, stats, &energy, counts))
                ++changed;
        }
        if (!changed) break;
    }

    // 3. decompose junctions that merged into more-than-triple points
    stats.junction_splits = split_junctions(m, cfg, kin, energy, time, events);

    // 4. quality swaps. A swap only changes the two triangles at its
    //    diagonal, so after the full sweep it suffices to revisit the edges
    //    of that quad. Each swap strictly improves the local quality, so the
    //    follow-up queue terminates on its own.
    {
        std::vector<std::array<int, 2>> queue;
        auto try_swap = [&](int a, int b) {
            if (!m.node_alive[a] || !m.node_alive[b]) return;
            int c = -1, d = -1;
            if (!swap_edge(m, a, b, &c, &d)) return;
            ++stats.swaps;
            queue.push_back({c, d});
            queue.push_back({a, c});
            queue.push_back({c, b});
            queue.push_back({b, d});
            queue.push_back({d, a});
        };
        for (const auto& ed : gather_edges(m)) try_swap(ed[0], ed[1]);
        for (size_t i = 0; i < queue.size(); ++i) {
            auto ed = queue[i];
            try_swap(ed[0], ed[1]);
        }
    }

    // 5. smoothing
    stats.smoothed = smooth_pass(m, cfg);

    return stats;
}

} // namespace trm
