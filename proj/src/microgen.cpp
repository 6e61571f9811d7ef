#include "trm/microgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "trm/error.hpp"
#include "trm/topology.hpp"

namespace trm {

namespace {

double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// incremental Delaunay with walking point location
// ---------------------------------------------------------------------------

struct Delaunay {
    std::vector<Vec2> pts;  // [0..2] is the enclosing super-triangle
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> adj;  // adj[k] faces the edge opposite v[k]
        bool alive = true;
    };
    std::vector<Tri> tris;
    int hint = 0;
    double scale = 1.0;

    Delaunay(const Vec2& lo, const Vec2& hi) {
        Vec2 c = (lo + hi) * 0.5;
        double R = 10.0 * std::max(hi.x - lo.x, hi.y - lo.y) + 1.0;
        scale = std::max(hi.x - lo.x, hi.y - lo.y);
        pts = {c + Vec2{0, 2 * R}, c + Vec2{-1.9 * R, -R}, c + Vec2{1.9 * R, -R}};
        tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    }

    static long double incircle(const Vec2& a, const Vec2& b, const Vec2& c,
                                const Vec2& p) {
        long double ax = a.x - p.x, ay = a.y - p.y;
        long double bx = b.x - p.x, by = b.y - p.y;
        long double cx = c.x - p.x, cy = c.y - p.y;
        long double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by,
                    c2 = cx * cx + cy * cy;
        return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
               a2 * (bx * cy - by * cx);
    }

    int locate(const Vec2& p) const {
        int t = hint;
        if (t < 0 || t >= (int)tris.size() || !tris[t].alive) {
            t = -1;
            for (int i = (int)tris.size() - 1; i >= 0; --i)
                if (tris[i].alive) { t = i; break; }
        }
        double eps = -1e-12 * scale * scale;
        for (int guard = 0; guard < (int)tris.size() + 8; ++guard) {
            const Tri& tr = tris[t];
            int worst = -1;
            double worst_c = eps;
            for (int k = 0; k < 3; ++k) {
                const Vec2& u = pts[tr.v[(k + 1) % 3]];
                const Vec2& w = pts[tr.v[(k + 2) % 3]];
                double c = cross(w - u, p - u);
                if (c < worst_c) { worst_c = c; worst = k; }
            }
            if (worst < 0) return t;
            int nxt = tr.adj[worst];
            if (nxt < 0) return t;  // outside: clamp (cannot happen inside super)
            t = nxt;
        }
        // numerical walk trouble: fall back to a full scan
        for (int i = 0; i < (int)tris.size(); ++i) {
            if (!tris[i].alive) continue;
            const Tri& tr = tris[i];
            bool in = true;
            for (int k = 0; k < 3 && in; ++k) {
                const Vec2& u = pts[tr.v[(k + 1) % 3]];
                const Vec2& w = pts[tr.v[(k + 2) % 3]];
                if (cross(w - u, p - u) < eps) in = false;
            }
            if (in) return i;
        }
        throw InvariantError("mesh generation: point location failed");
    }

    int insert(const Vec2& p) {
        int t0 = locate(p);
        for (int k = 0; k < 3; ++k) {
            int v = tris[t0].v[k];
            if (dist(pts[v], p) < 1e-12 * scale) return v;  // duplicate
        }
        int pid = (int)pts.size();
        pts.push_back(p);

        // grow the cavity of circumcircle violations
        std::vector<int> bad{t0};
        std::set<int> in_bad{t0};
        for (size_t i = 0; i < bad.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                int nb = tris[bad[i]].adj[k];
                if (nb < 0 || in_bad.count(nb)) continue;
                const Tri& tr = tris[nb];
                if (incircle(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]], p) > 0) {
                    bad.push_back(nb);
                    in_bad.insert(nb);
                }
            }
        }
        // boundary fan: each rim edge (u,w) with its outside neighbor
        struct Rim { int u, w, out; };
        std::vector<Rim> rim;
        for (int b : bad) {
            for (int k = 0; k < 3; ++k) {
                int nb = tris[b].adj[k];
                if (nb >= 0 && in_bad.count(nb)) continue;
                rim.push_back({tris[b].v[(k + 1) % 3], tris[b].v[(k + 2) % 3], nb});
            }
        }
        for (int b : bad) tris[b].alive = false;

        std::unordered_map<int, int> by_first, by_second;
        int base = (int)tris.size();
        for (size_t i = 0; i < rim.size(); ++i) {
            int ti = base + (int)i;
            by_first[rim[i].u] = ti;
            by_second[rim[i].w] = ti;
        }
        for (size_t i = 0; i < rim.size(); ++i) {
            int ti = base + (int)i;
            Tri nt;
            nt.v = {rim[i].u, rim[i].w, pid};
            nt.adj = {by_first.at(rim[i].w), by_second.at(rim[i].u), rim[i].out};
            if (rim[i].out >= 0) {
                Tri& o = tris[rim[i].out];
                for (int k = 0; k < 3; ++k) {
                    int x = o.v[(k + 1) % 3], y = o.v[(k + 2) % 3];
                    if ((x == rim[i].u && y == rim[i].w) ||
                        (x == rim[i].w && y == rim[i].u))
                        o.adj[k] = ti;
                }
            }
            tris.push_back(nt);
        }
        hint = base;
        return pid;
    }

    bool has_edge(int a, int b) const {
        for (const Tri& t : tris) {
            if (!t.alive) continue;
            for (int k = 0; k < 3; ++k)
                if ((t.v[k] == a && t.v[(k + 1) % 3] == b) ||
                    (t.v[k] == b && t.v[(k + 1) % 3] == a))
                    return true;
        }
        return false;
    }
};

// ---------------------------------------------------------------------------
// PSLG assembly helpers
// ---------------------------------------------------------------------------

struct Builder {
    std::vector<Vec2> domain;  // CCW polygon
    std::vector<Vec2> fixed;   // boundary samples (walls + interfaces)
    std::vector<std::pair<int, int>> required;        // interface edges
    std::vector<std::array<Vec2, 2>> clearance_segs;  // keep-out for fill
    double snap_tol = 0;
    std::map<std::pair<int64_t, int64_t>, std::vector<int>> grid;

    int add_point(const Vec2& p) {
        int64_t gx = (int64_t)std::floor(p.x / (4 * snap_tol));
        int64_t gy = (int64_t)std::floor(p.y / (4 * snap_tol));
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({gx + dx, gy + dy});
                if (it == grid.end()) continue;
                for (int idx : it->second)
                    if (dist(fixed[idx], p) <= snap_tol) return idx;
            }
        int idx = (int)fixed.size();
        fixed.push_back(p);
        grid[{gx, gy}].push_back(idx);
        return idx;
    }

    // sample an open polyline exactly on its vertices plus uniform fill, and
    // register every sub-edge as required
    void add_chain(const std::vector<Vec2>& poly, bool closed, double h) {
        std::vector<int> ids;
        size_t nseg = closed ? poly.size() : poly.size() - 1;
        for (size_t s = 0; s < nseg; ++s) {
            const Vec2& a = poly[s];
            const Vec2& b = poly[(s + 1) % poly.size()];
            double len = dist(a, b);
            if (len <= snap_tol) continue;
            int m = std::max(1, (int)std::ceil(len / h - 1e-9));
            int prev = add_point(a);
            if (ids.empty()) ids.push_back(prev);
            for (int k = 1; k <= m; ++k) {
                Vec2 p = a + (b - a) * ((double)k / m);
                int cur = add_point(p);
                if (cur != prev) {
                    required.push_back({prev, cur});
                    clearance_segs.push_back({fixed[prev], fixed[cur]});
                }
                prev = cur;
            }
        }
    }

    // wall sampling: polygon corners plus any interface endpoints that land
    // on a wall, filled to spacing h
    void sample_walls(const std::vector<Vec2>& mandatory, double h) {
        int nd = (int)domain.size();
        for (int i = 0; i < nd; ++i) {
            Vec2 a = domain[i], b = domain[(i + 1) % nd];
            Vec2 d = b - a;
            double len = norm(d);
            std::vector<double> ts{0.0, 1.0};
            for (const Vec2& p : mandatory) {
                double t = dot(p - a, d) / (len * len);
                if (t <= 1e-12 || t >= 1 - 1e-12) continue;
                if (dist(a + d * t, p) <= snap_tol) ts.push_back(t);
            }
            std::sort(ts.begin(), ts.end());
            std::vector<Vec2> samples;
            for (size_t s = 0; s + 1 < ts.size(); ++s) {
                double t0 = ts[s], t1 = ts[s + 1];
                int m = std::max(1, (int)std::ceil((t1 - t0) * len / h - 1e-9));
                for (int k = 0; k < m; ++k)
                    samples.push_back(a + d * (t0 + (t1 - t0) * k / m));
            }
            for (const Vec2& p : samples) add_point(p);
            clearance_segs.push_back({a, b});
        }
    }
};

bool inside_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            double xc = poly[j].x +
                        (p.y - poly[j].y) / (poly[i].y - poly[j].y) *
                            (poly[i].x - poly[j].x);
            if (p.x < xc) in = !in;
        }
    }
    return in;
}

double seg_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 d = b - a;
    double l2 = norm2(d);
    if (l2 <= 0) return dist(p, a);
    double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
    return dist(p, a + d * t);
}

Mesh triangulate(Builder& bld, double h, uint64_t seed,
                 const std::function<int(const Vec2&)>& region_of) {
    // interior fill: jittered hexagonal lattice away from all constraints
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const Vec2& p : bld.domain) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    std::mt19937_64 rng(seed);
    std::vector<Vec2> interior;
    double row = h * std::sqrt(3.0) / 2.0;
    double clear2 = 0.7 * h * 0.7 * h;
    int jmax = (int)std::ceil((hi.y - lo.y) / row);
    for (int j = 0; j <= jmax; ++j) {
        double y = lo.y + j * row;
        double x0 = lo.x + ((j & 1) ? h * 0.5 : 0.0);
        for (double x = x0; x <= hi.x; x += h) {
            Vec2 p{x + (u01(rng) - 0.5) * 0.1 * h, y + (u01(rng) - 0.5) * 0.1 * h};
            if (!inside_polygon(bld.domain, p)) continue;
            bool ok = true;
            for (const auto& s : bld.clearance_segs) {
                double d = seg_dist(p, s[0], s[1]);
                if (d * d < clear2) { ok = false; break; }
            }
            if (ok) interior.push_back(p);
        }
    }

    Delaunay dt(lo, hi);
    std::vector<int> fixed_id(bld.fixed.size());
    for (size_t i = 0; i < bld.fixed.size(); ++i) fixed_id[i] = dt.insert(bld.fixed[i]);
    for (const Vec2& p : interior) dt.insert(p);

    // recover interface edges the triangulation may have skipped
    std::vector<std::pair<int, int>> need;
    for (auto [a, b] : bld.required) need.push_back({fixed_id[a], fixed_id[b]});
    for (int round = 0; round < 5; ++round) {
        std::set<std::pair<int, int>> have;
        for (const auto& t : dt.tris) {
            if (!t.alive) continue;
            for (int k = 0; k < 3; ++k) {
                int a = t.v[k], b = t.v[(k + 1) % 3];
                have.insert({std::min(a, b), std::max(a, b)});
            }
        }
        std::vector<std::pair<int, int>> next;
        bool missing = false;
        for (auto [a, b] : need) {
            if (have.count({std::min(a, b), std::max(a, b)})) {
                next.push_back({a, b});
                continue;
            }
            missing = true;
            int mid = dt.insert((dt.pts[a] + dt.pts[b]) * 0.5);
            next.push_back({a, mid});
            next.push_back({mid, b});
        }
        need.swap(next);
        if (!missing) break;
        if (round == 4) throw ConfigError("mesh generation: interface edge not recoverable; reduce h");
    }

    // assemble, dropping the super-triangle
    Mesh m;
    m.domain = bld.domain;
    std::vector<int> remap(dt.pts.size(), -1);
    for (size_t i = 3; i < dt.pts.size(); ++i) remap[i] = m.add_node(dt.pts[i]);
    for (const auto& t : dt.tris) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        Vec2 c = (dt.pts[t.v[0]] + dt.pts[t.v[1]] + dt.pts[t.v[2]]) * (1.0 / 3.0);
        int s = region_of(c);
        m.add_element(remap[t.v[0]], remap[t.v[1]], remap[t.v[2]], s);
    }
    classify_nodes(m);
    ValidationReport rep = validate(m);
    if (!rep.ok()) throw InvariantError("generated mesh invalid: " + rep.str());
    return m;
}

std::vector<Vec2> circle_poly(const Vec2& c, double r, double h) {
    int k = std::max(12, (int)std::ceil(2 * M_PI * r / h));
    std::vector<Vec2> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
        double a = 2 * M_PI * i / k;
        out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

Mesh gen_circle(const GeneratorSpec& spec) {
    Vec2 c = (spec.lo + spec.hi) * 0.5;
    std::vector<Vec2> ring = circle_poly(c, spec.r0, spec.h);
    Builder bld;
    bld.domain = {spec.lo, {spec.hi.x, spec.lo.y}, spec.hi, {spec.lo.x, spec.hi.y}};
    bld.snap_tol = 1e-8 * std::max(spec.hi.x - spec.lo.x, spec.hi.y - spec.lo.y);
    bld.sample_walls({}, spec.h);
    bld.add_chain(ring, true, spec.h);
    return triangulate(bld, spec.h, spec.seed, [&](const Vec2& p) {
        return inside_polygon(ring, p) ? 1 : 0;
    });
}

Mesh gen_triple(const GeneratorSpec& spec) {
    double a = spec.a;
    Vec2 v0{0, 0}, v1{a, 0}, v2{a / 2, a * std::sqrt(3.0) / 2};
    Vec2 J{a / 2, a / (2 * std::sqrt(3.0))};  // incentre
    Vec2 mb{a / 2, 0};                        // base midpoint
    Vec2 mr = (v1 + v2) * 0.5;                // right side midpoint
    Vec2 ml = (v0 + v2) * 0.5;                // left side midpoint

    Builder bld;
    bld.domain = {v0, v1, v2};
    bld.snap_tol = 1e-8 * a;
    bld.sample_walls({mb, mr, ml}, spec.h);
    bld.add_chain({J, mb}, false, spec.h);
    bld.add_chain({J, mr}, false, spec.h);
    bld.add_chain({J, ml}, false, spec.h);

    std::vector<Vec2> upper = {ml, J, mr, v2};
    std::vector<Vec2> lower_left = {v0, mb, J, ml};
    return triangulate(bld, spec.h, spec.seed, [=](const Vec2& p) {
        if (inside_polygon(upper, p)) return 0;
        if (inside_polygon(lower_left, p)) return 1;
        return 2;
    });
}

Mesh gen_six(const GeneratorSpec& spec) {
    Vec2 c = (spec.lo + spec.hi) * 0.5;
    double s = std::min(spec.hi.x - spec.lo.x, spec.hi.y - spec.lo.y);
    double r = 0.18 * s, half = 0.275 * s;
    Vec2 q0{c.x - half, c.y - half}, q1{c.x + half, c.y - half};
    Vec2 q2{c.x + half, c.y + half}, q3{c.x - half, c.y + half};
    Vec2 d0 = spec.lo, d1{spec.hi.x, spec.lo.y}, d2 = spec.hi, d3{spec.lo.x, spec.hi.y};

    std::vector<Vec2> ring = circle_poly(c, r, spec.h);
    std::vector<Vec2> square = {q0, q1, q2, q3};

    Builder bld;
    bld.domain = {d0, d1, d2, d3};
    bld.snap_tol = 1e-8 * s;
    bld.sample_walls({}, spec.h);
    bld.add_chain(ring, true, spec.h);
    bld.add_chain(square, true, spec.h);
    bld.add_chain({d0, q0}, false, spec.h);
    bld.add_chain({d1, q1}, false, spec.h);
    bld.add_chain({d2, q2}, false, spec.h);
    bld.add_chain({d3, q3}, false, spec.h);

    std::vector<Vec2> bottom = {d0, d1, q1, q0};
    std::vector<Vec2> right = {d1, d2, q2, q1};
    std::vector<Vec2> top = {d2, d3, q3, q2};
    return triangulate(bld, spec.h, spec.seed, [=](const Vec2& p) {
        if (inside_polygon(ring, p)) return 0;
        if (inside_polygon(square, p)) return 1;
        if (inside_polygon(bottom, p)) return 2;
        if (inside_polygon(right, p)) return 3;
        if (inside_polygon(top, p)) return 4;
        return 5;
    });
}

struct LabeledPoly {
    std::vector<Vec2> v;
    std::vector<int> lab;  // label of edge v[i] -> v[i+1]
};

LabeledPoly clip_half_plane(const LabeledPoly& in, const Vec2& n, double off,
                            int label) {
    // keep the side n·x <= off; the closing edge gets `label`
    LabeledPoly out;
    size_t k = in.v.size();
    for (size_t i = 0; i < k; ++i) {
        const Vec2& a = in.v[i];
        const Vec2& b = in.v[(i + 1) % k];
        double fa = dot(n, a) - off, fb = dot(n, b) - off;
        bool ia = fa <= 0, ib = fb <= 0;
        if (ia) {
            out.v.push_back(a);
            out.lab.push_back(in.lab[i]);
        }
        if (ia != ib) {
            double t = fa / (fa - fb);
            out.v.push_back(a + (b - a) * t);
            // an exit point starts the run along the clip line (new label);
            // an entry point resumes the remainder of the original edge
            out.lab.push_back(ia ? label : in.lab[i]);
        }
    }
    return out;
}

Mesh gen_laguerre(const GeneratorSpec& spec) {
    double W = spec.hi.x - spec.lo.x, H = spec.hi.y - spec.lo.y;
    int n = spec.n;
    std::vector<Vec2> seeds = laguerre_seeds(spec);
    std::vector<double> w(n, 0.0);
    if (!spec.weights.empty()) {
        if ((int)spec.weights.size() != n)
            throw ConfigError("laguerre weights must match the cell count");
        for (int i = 0; i < n; ++i) w[i] = spec.weights[i] * spec.weights[i];
    }

    Builder bld;
    bld.domain = {spec.lo, {spec.hi.x, spec.lo.y}, spec.hi, {spec.lo.x, spec.hi.y}};
    bld.snap_tol = 1e-8 * std::max(W, H);
    std::vector<Vec2> wall_mandatory;
    std::vector<std::vector<Vec2>> cell_edges;  // canonical (i<j) 2-point chains

    for (int i = 0; i < n; ++i) {
        LabeledPoly cell;
        cell.v = bld.domain;
        cell.lab = {-1, -2, -3, -4};
        for (int j = 0; j < n && !cell.v.empty(); ++j) {
            if (j == i) continue;
            Vec2 nrm = (seeds[j] - seeds[i]) * 2.0;
            double off = norm2(seeds[j]) - norm2(seeds[i]) + w[i] - w[j];
            cell = clip_half_plane(cell, nrm, off, j);
        }
        if (cell.v.size() < 3)
            throw ConfigError("laguerre weights produce an empty cell");
        size_t k = cell.v.size();
        for (size_t e = 0; e < k; ++e) {
            int lab = cell.lab[e];
            if (lab < 0 || lab < i) continue;  // walls, or already emitted by the lower id
            Vec2 a = cell.v[e], b = cell.v[(e + 1) % k];
            if (dist(a, b) <= bld.snap_tol) continue;
            cell_edges.push_back({a, b});
            auto on_wall = [&](const Vec2& p) {
                return p.x <= spec.lo.x + bld.snap_tol || p.x >= spec.hi.x - bld.snap_tol ||
                       p.y <= spec.lo.y + bld.snap_tol || p.y >= spec.hi.y - bld.snap_tol;
            };
            if (on_wall(a)) wall_mandatory.push_back(a);
            if (on_wall(b)) wall_mandatory.push_back(b);
        }
    }
    bld.sample_walls(wall_mandatory, spec.h);
    for (const auto& e : cell_edges) bld.add_chain(e, false, spec.h);

    return triangulate(bld, spec.h, spec.seed + 0x9e3779b97f4a7c15ull,
                       [seeds, w](const Vec2& p) {
                           int best = 0;
                           double bd = 1e300;
                           for (size_t i = 0; i < seeds.size(); ++i) {
                               double d = norm2(p - seeds[i]) - w[i];
                               if (d < bd) { bd = d; best = (int)i; }
                           }
                           return best;
                       });
}

} // namespace

void GeneratorSpec::check() const {
    if (!(h > 0)) throw ConfigError("mesh size must be positive");
    if (!(hi.x > lo.x && hi.y > lo.y) && preset != Preset::TripleJunction)
        throw ConfigError("domain rectangle is empty");
    switch (preset) {
        case Preset::Circle:
            if (!(r0 > 0) || r0 >= 0.5 * std::min(hi.x - lo.x, hi.y - lo.y))
                throw ConfigError("circle radius must fit inside the domain");
            break;
        case Preset::TripleJunction:
            if (!(a > 0)) throw ConfigError("triangle side must be positive");
            if (h >= a / 4) throw ConfigError("mesh size too large for the triangle");
            break;
        case Preset::SixGrain:
            if (h >= 0.18 * std::min(hi.x - lo.x, hi.y - lo.y))
                throw ConfigError("mesh size too large for the six-grain layout");
            break;
        case Preset::Laguerre:
            if (n < 1) throw ConfigError("cell count must be at least 1");
            for (double v : weights)
                if (v < 0) throw ConfigError("negative laguerre weight");
            break;
    }
}

std::vector<Vec2> laguerre_seeds(const GeneratorSpec& spec) {
    double W = spec.hi.x - spec.lo.x, H = spec.hi.y - spec.lo.y;
    int n = spec.n;
    double min_sep = 0.3 * std::sqrt(W * H / n);
    double margin = 0.02 * std::min(W, H);
    std::mt19937_64 rng(spec.seed);
    std::vector<Vec2> seeds;
    for (int attempts = 0; (int)seeds.size() < n; ++attempts) {
        if (attempts > 2000 * n)
            throw ConfigError("could not place the requested number of seeds; too dense");
        Vec2 p{spec.lo.x + margin + (W - 2 * margin) * u01(rng),
               spec.lo.y + margin + (H - 2 * margin) * u01(rng)};
        bool ok = true;
        for (const Vec2& q : seeds)
            if (dist(p, q) < min_sep) { ok = false; break; }
        if (ok) seeds.push_back(p);
    }
    return seeds;
}

Mesh generate(const GeneratorSpec& spec) {
    spec.check();
    switch (spec.preset) {
        case GeneratorSpec::Preset::Circle: return gen_circle(spec);
        case GeneratorSpec::Preset::TripleJunction: return gen_triple(spec);
        case GeneratorSpec::Preset::SixGrain: return gen_six(spec);
        case GeneratorSpec::Preset::Laguerre: return gen_laguerre(spec);
    }
    throw ConfigError("unknown preset");
}

} // namespace trm
