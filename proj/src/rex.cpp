#include "trm/rex.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trm/error.hpp"
#include "trm/topology.hpp"

namespace trm {

void MaterialParams::check() const {
    auto pos = [](double v, const char* what) {
        if (!(v > 0)) throw ConfigError(std::string("material parameter must be positive: ") + what);
    };
    pos(M0, "M0");
    pos(Q, "Q");
    pos(R, "R");
    pos(T, "T");
    pos(gamma, "gamma");
    pos(tau, "tau");
    pos(Ks, "Ks");
    pos(rho0, "rho0");
    pos(b_dim, "b_dim");
    pos(delta_rest, "delta_rest");
    if (!(omega >= 1)) throw ConfigError("nucleus safety factor must be >= 1");
    if (!(conv > 0 && conv <= 1)) throw ConfigError("convergence factor must be in (0, 1]");
    if (table.empty()) throw ConfigError("rate table is empty");
    for (size_t i = 0; i < table.size(); ++i) {
        const RateRow& r = table[i];
        if (!(r.rate > 0 && r.K1 > 0 && r.K2 > 0 && r.Kg > 0 && r.delta > 0))
            throw ConfigError("rate table entries must be positive");
        if (i > 0 && !(table[i - 1].rate < r.rate))
            throw ConfigError("rate table keys must be strictly increasing");
    }
}

MaterialParams steel_304L() {
    MaterialParams mp;
    mp.table = {{0.01, 1.105e9, 9.0, 1.3e-4, 0.937},
                {0.1, 1.55e9, 6.9, 9e-4, 2.245}};
    return mp;
}

RateRow interp_params(const MaterialParams& mp, double rate_abs) {
    const auto& tb = mp.table;
    if (tb.empty()) throw ConfigError("material has no rate table");
    if (rate_abs <= tb.front().rate) {
        RateRow r = tb.front();
        r.rate = rate_abs;
        return r;
    }
    if (rate_abs >= tb.back().rate) {
        RateRow r = tb.back();
        r.rate = rate_abs;
        return r;
    }
    size_t i = 1;
    while (tb[i].rate < rate_abs) ++i;
    const RateRow& lo = tb[i - 1];
    const RateRow& hi = tb[i];
    double w = (rate_abs - lo.rate) / (hi.rate - lo.rate);
    return {rate_abs, lo.K1 + w * (hi.K1 - lo.K1), lo.K2 + w * (hi.K2 - lo.K2),
            lo.Kg + w * (hi.Kg - lo.Kg), lo.delta + w * (hi.delta - lo.delta)};
}

double harden(double rho, double deps, double K1, double K2) {
    if (deps < 0) throw Error("negative strain increment");
    if (K2 * deps >= 1.0)
        throw Error("strain increment too large for the hardening update");
    return K1 * deps + (1.0 - K2 * deps) * rho;
}

double homogenize_growth(double rho, double S_t, double dS, double rho0) {
    if (dS <= 0) return rho;
    return (rho * S_t + dS * rho0) / (S_t + dS);
}

double recover(double rho, double dt, double Ks, double rho0) {
    return std::max(rho0, rho * std::exp(-Ks * dt));
}

namespace {

// Balance map g(x); the critical density is its fixed point in (0, K1/K2).
double critical_map(const MaterialParams& mp, double K1, double K2, double delta,
                    double rate_eff, double x) {
    double num = mp.b_dim * mp.gamma * rate_eff * K2 /
                 (mp.mobility() * delta * mp.tau * mp.tau);
    double arg = 1.0 - (K2 / K1) * x;
    return std::sqrt(num / -std::log(arg));
}

} // namespace

double critical_density_residual(const MaterialParams& mp, double K1, double K2,
                                 double delta, double rate_eff, double x) {
    return x - critical_map(mp, K1, K2, delta, rate_eff, x);
}

CriticalDensity critical_density(const MaterialParams& mp, double K1, double K2,
                                 double delta, double rate_eff) {
    if (!(rate_eff > 0)) throw Error("critical density needs a positive strain rate");
    const double sat = K1 / K2;
    const double cap = 0.999 * sat;
    CriticalDensity out;
    double x = 0.5 * sat;
    for (int it = 0; it < 500; ++it) {
        double g = critical_map(mp, K1, K2, delta, rate_eff, std::min(x, cap));
        out.iters = it + 1;
        if (std::abs(g - x) <= 1e-6 * std::max(x, 1e-300)) {
            out.rho_c = x;
            out.converged = true;
            return out;
        }
        x += mp.conv * (g - x);
        if (x > cap) x = cap;
        if (x < 1e-300) x = 1e-300;
    }
    out.rho_c = x;
    throw Error("critical density iteration did not converge");
}

double StrainAccumulators::apparent_rate() const {
    if (!(int_rate > 0)) throw Error("apparent strain rate undefined before deformation");
    return int_rate2 / int_rate;
}

double nucleus_radius(double rho_c, double rho0, double gamma, double tau,
                      double omega) {
    if (!(rho_c > rho0)) throw Error("nucleus radius needs rho_c above rho0");
    return omega * gamma / ((rho_c - rho0) * tau);
}

namespace {

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 d = b - a;
    double l2 = norm2(d);
    if (l2 <= 0) return dist(p, a);
    double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
    return dist(p, a + d * t);
}

} // namespace

int insert_nucleus(Mesh& m, int center, double r, double time, EventLog& events,
                   double* inserted_area) {
    if (center < 0 || center >= m.n_nodes() || !m.node_alive[center]) return -1;
    if (m.hull[center] || m.corner[center] || !(r > 0)) return -1;
    const Vec2 c = m.pos[center];

    // the whole circle has to fit strictly inside the domain
    int nd = static_cast<int>(m.domain.size());
    for (int i = 0; i < nd; ++i) {
        if (point_segment_dist(c, m.domain[i], m.domain[(i + 1) % nd]) <= r * (1 + 1e-12))
            return -1;
    }

    Mesh backup = m;
    const double on_tol = 1e-9 * r;
    auto on_circle = [&](int n) { return std::abs(dist(m.pos[n], c) - r) <= on_tol; };

    // split every edge crossing the circle at the exact intersection; fresh
    // cuts can expose new crossings, so sweep to a fixed point
    bool rejected = false;
    for (int round = 0; round < 64 && !rejected; ++round) {
        std::set<std::pair<int, int>> edges;
        for (int e = 0; e < m.n_elems(); ++e) {
            if (!m.elem_alive[e]) continue;
            const auto& t = m.tri[e];
            for (int k = 0; k < 3; ++k) {
                int a = t[k], b = t[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                edges.insert({a, b});
            }
        }
        int cuts = 0;
        for (const auto& [a, b] : edges) {
            Vec2 pa = m.pos[a], pb = m.pos[b];
            Vec2 d = pb - pa;
            double A = norm2(d);
            if (A <= 0) continue;
            double B = 2 * dot(pa - c, d);
            double C = norm2(pa - c) - r * r;
            double disc = B * B - 4 * A * C;
            if (disc <= 0) continue;
            double sq = std::sqrt(disc);
            for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)}) {
                if (t <= 0 || t >= 1) continue;
                Vec2 p = pa + d * t;
                bool near_a = dist(p, pa) <= on_tol, near_b = dist(p, pb) <= on_tol;
                if (near_a || near_b) {
                    // grazes an existing node: fine when that node already
                    // sits on the circle, hopeless otherwise
                    if ((near_a && !on_circle(a)) || (near_b && !on_circle(b)))
                        rejected = true;
                    continue;
                }
                int nn = -1;
                if (!split_edge_at(m, a, b, p, nn)) rejected = true;
                ++cuts;
                break;  // a second crossing now lives in a child edge
            }
            if (rejected) break;
        }
        if (rejected || cuts == 0) {
            if (!rejected && round == 63) rejected = true;  // never settled
            break;
        }
    }

    std::vector<int> patch;
    if (!rejected) {
        auto blocked = [&](int, int, int na, int nb) {
            return on_circle(na) && on_circle(nb);
        };
        patch = flood_elements(m, m.star[center].front(), blocked);
        double area = 0;
        for (int e : patch) {
            area += m.area(e);
            for (int n : m.tri[e])
                if (dist(m.pos[n], c) > r + on_tol) rejected = true;  // leak
        }
        if (patch.empty() || !(area > 0)) rejected = true;
        if (!rejected) {
            int ns = m.alloc_surf();
            for (int e : patch) m.surf[e] = ns;
            std::set<int> touched;
            for (int e : patch)
                for (int n : m.tri[e]) touched.insert(n);
            for (int n : touched) classify_node(m, n);
            events.push_back({Event::Kind::Nucleate, time, ns, center});
            if (inserted_area) *inserted_area = area;
            return ns;
        }
    }
    m = std::move(backup);
    return -1;
}

NucleationOutcome nucleation_step(Mesh& m, const std::vector<GrainState>& grains,
                                  double rho_c, double r_star, double budget,
                                  std::mt19937_64& rng, double time,
                                  EventLog& events) {
    NucleationOutcome out;
    out.residual = budget;
    if (!(r_star > 0)) return out;
    const double a_nominal = M_PI * r_star * r_star;
    if (out.residual < a_nominal) return out;

    std::vector<char> hot(grains.size(), 0);
    for (size_t s = 0; s < grains.size(); ++s) hot[s] = grains[s].rho >= rho_c;

    std::vector<int> cand;
    {
        std::set<int> seen;
        for (int e = 0; e < m.n_elems(); ++e) {
            if (!m.elem_alive[e]) continue;
            int s = m.surf[e];
            if (s < 0 || s >= static_cast<int>(hot.size()) || !hot[s]) continue;
            for (int n : m.tri[e])
                if (m.kind[n] != NodeKind::Bulk && !m.hull[n]) seen.insert(n);
        }
        cand.assign(seen.begin(), seen.end());
    }

    std::vector<Vec2> placed;
    while (out.residual >= a_nominal && !cand.empty()) {
        size_t idx = static_cast<size_t>(rng() % cand.size());
        int n = cand[idx];
        cand.erase(cand.begin() + idx);
        if (!m.node_alive[n] || m.kind[n] == NodeKind::Bulk) continue;
        bool clash = false;
        for (const Vec2& q : placed)
            if (dist(q, m.pos[n]) < 2.1 * r_star) clash = true;
        if (clash) continue;
        double got = 0;
        int ns = insert_nucleus(m, n, r_star, time, events, &got);
        if (ns < 0) continue;
        placed.push_back(m.pos[n]);
        ++out.inserted;
        out.area += got;
        out.residual -= got;
    }
    return out;
}

} // namespace trm
