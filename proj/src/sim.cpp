#include "trm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trm/error.hpp"
#include "trm/microgen.hpp"

namespace trm {

std::uint64_t substream(std::uint64_t seed, std::uint64_t step) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (step + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

Kinetics kinetics_for(const SimConfig& cfg, const Segment& seg) {
    Kinetics kin;
    kin.capillarity = cfg.schedule.capillarity;
    if (cfg.schedule.rex) {
        double T = seg.T > 0 ? seg.T : cfg.mat.T;
        kin.mobility = cfg.mat.M0 * std::exp(-cfg.mat.Q / (cfg.mat.R * T));
        kin.gamma = cfg.mat.gamma;
        kin.delta = seg.rate != 0
                        ? interp_params(cfg.mat, std::abs(seg.rate)).delta
                        : cfg.mat.delta_rest;
    } else {
        kin.mobility = cfg.mobility;
        kin.gamma = cfg.gamma;
        kin.delta = cfg.delta;
    }
    // average the curvature read-out over a few node spacings; pointwise
    // values go unstable under the explicit update once dt exceeds the
    // spacing-squared scale
    kin.curv_window = 2.5 * cfg.remesh.h;
    return kin;
}

void rebuild_energy(SimState& st, const SimConfig& cfg) {
    st.energy.assign(st.mesh.next_surf, 0.0);
    for (int s = 0; s < (int)st.grains.size() && s < (int)st.energy.size(); ++s)
        st.energy[s] = cfg.mat.tau * st.grains[s].rho;
}

CollapseMode collapse_mode(const SimState& st, const SimConfig& cfg) {
    if (cfg.schedule.rex) return CollapseMode::General;
    for (double e : st.energy)
        if (e != 0) return CollapseMode::General;
    return CollapseMode::Strict;
}

// grains follow surface splits performed by the mesh operators
void replay_grain_events(SimState& st, size_t from) {
    for (size_t i = from; i < st.events.size(); ++i) {
        const Event& e = st.events[i];
        if (e.kind == Event::Kind::GrainSplit) {
            if (e.b >= (int)st.grains.size()) st.grains.resize(e.b + 1);
            st.grains[e.b] = st.grains[e.a];
        }
    }
}

CriticalNow critical_from(const SimConfig& cfg, const Segment& seg,
                          const StrainAccumulators& strain) {
    CriticalNow cn;
    cn.deforming = seg.rate != 0;
    if (cn.deforming) {
        cn.rate_eff = std::abs(seg.rate);
    } else {
        if (strain.int_rate <= 0) return cn;  // nothing deformed yet
        cn.rate_eff = strain.apparent_rate();
    }
    cn.row = interp_params(cfg.mat, cn.rate_eff);
    double delta_eff = cn.deforming ? cn.row.delta : cfg.mat.delta_rest;
    MaterialParams mp = cfg.mat;
    if (seg.T > 0) mp.T = seg.T;
    CriticalDensity cd = critical_density(mp, cn.row.K1, cn.row.K2, delta_eff, cn.rate_eff);
    cn.rho_c = cd.rho_c;
    if (cn.rho_c > cfg.mat.rho0)
        cn.r_star = nucleus_radius(cn.rho_c, cfg.mat.rho0, cfg.mat.gamma,
                                   cfg.mat.tau, cfg.mat.omega);
    cn.ok = cd.converged;
    return cn;
}

void rex_update(SimState& st, const SimConfig& cfg, const Segment& seg, double dt) {
    Topology topo = identify(st.mesh);
    if ((int)st.grains.size() < st.mesh.next_surf)
        st.grains.resize(st.mesh.next_surf, GrainState{cfg.mat.rho0, 0, false, st.time});

    bool deforming = seg.rate != 0;
    if (deforming) {
        double rate = std::abs(seg.rate);
        RateRow row = interp_params(cfg.mat, rate);
        double deps = rate * dt;
        st.strain.accumulate(rate, dt);
        for (const Surface& sf : topo.surfaces)
            st.grains[sf.id].rho = harden(st.grains[sf.id].rho, deps, row.K1, row.K2);
    }
    for (const Surface& sf : topo.surfaces) {
        GrainState& g = st.grains[sf.id];
        double dS = sf.area - g.area;
        if (g.area > 0 && dS > 0)
            g.rho = homogenize_growth(g.rho, g.area, dS, cfg.mat.rho0);
    }
    if (!deforming)
        for (const Surface& sf : topo.surfaces)
            st.grains[sf.id].rho =
                recover(st.grains[sf.id].rho, dt, cfg.mat.Ks, cfg.mat.rho0);
    for (const Surface& sf : topo.surfaces) st.grains[sf.id].area = sf.area;

    CriticalNow cn = critical_from(cfg, seg, st.strain);
    if (!cn.ok || cn.rho_c <= cfg.mat.rho0 || cn.r_star <= 0) return;

    double pc = 0;
    for (const Surface& sf : topo.surfaces)
        if (st.grains[sf.id].rho >= cn.rho_c) pc += sf.perimeter;
    double budget = st.nucl_residual + cn.row.Kg * pc * dt;

    std::mt19937_64 rng(substream(cfg.seed, (std::uint64_t)st.step_no));
    size_t ev0 = st.events.size();
    NucleationOutcome out = nucleation_step(st.mesh, st.grains, cn.rho_c, cn.r_star,
                                            budget, rng, st.time, st.events);
    st.nucl_residual = out.residual;
    if (out.inserted > 0) {
        for (size_t i = ev0; i < st.events.size(); ++i) {
            const Event& e = st.events[i];
            if (e.kind != Event::Kind::Nucleate) continue;
            if (e.a >= (int)st.grains.size()) st.grains.resize(e.a + 1);
            st.grains[e.a] = GrainState{cfg.mat.rho0, 0.0, true, st.time};
        }
        Topology t2 = identify(st.mesh);
        for (const Surface& sf : t2.surfaces)
            if (sf.id < (int)st.grains.size()) st.grains[sf.id].area = sf.area;
    }
}

void remap_surfaces(SimState& st, const std::vector<int>& surf_map) {
    int ns = st.mesh.next_surf;
    if (!st.grains.empty()) {
        std::vector<GrainState> ng(ns);
        for (int old = 0; old < (int)surf_map.size(); ++old) {
            int nu = surf_map[old];
            if (nu >= 0 && old < (int)st.grains.size()) ng[nu] = st.grains[old];
        }
        st.grains.swap(ng);
    }
    std::vector<double> ne(ns, 0.0);
    for (int old = 0; old < (int)surf_map.size(); ++old) {
        int nu = surf_map[old];
        if (nu >= 0 && old < (int)st.energy.size()) ne[nu] = st.energy[old];
    }
    st.energy.swap(ne);
}

} // namespace

SimState init_state(const SimConfig& cfg) {
    SimState st;
    st.mesh = generate(cfg.gen);
    Topology topo = identify(st.mesh);
    int ns = st.mesh.next_surf;

    if ((int)cfg.init_energy.size() > ns)
        throw ConfigError("[energy] surf id beyond the generated surfaces");
    if ((int)cfg.init_rho.size() > ns)
        throw ConfigError("[rho] surf id beyond the generated surfaces");

    st.energy.assign(ns, cfg.default_energy);
    for (int s = 0; s < (int)cfg.init_energy.size(); ++s)
        st.energy[s] = cfg.init_energy[s];

    if (cfg.schedule.rex) {
        double r0 = cfg.default_rho >= 0 ? cfg.default_rho : cfg.mat.rho0;
        st.grains.assign(ns, GrainState{r0, 0.0, false, 0.0});
        for (int s = 0; s < (int)cfg.init_rho.size(); ++s)
            if (cfg.init_rho[s] >= 0) st.grains[s].rho = cfg.init_rho[s];
        for (const Surface& sf : topo.surfaces) st.grains[sf.id].area = sf.area;
        rebuild_energy(st, cfg);
    }
    return st;
}

void step(SimState& st, const SimConfig& cfg, double dt) {
    if (!(dt > 0)) throw Error("step: dt must be positive");
    const Segment& seg = cfg.schedule.segments[cfg.schedule.segment_at(st.time)];
    Kinetics kin = kinetics_for(cfg, seg);
    if (cfg.schedule.rex) rebuild_energy(st, cfg);
    CollapseMode mode = collapse_mode(st, cfg);

    size_t ev0 = st.events.size();
    st.last_remesh = remesh_pass(st.mesh, cfg.remesh, mode, kin, st.energy,
                                 st.time, st.events);
    split_junctions(st.mesh, cfg.remesh, kin, st.energy, st.time, st.events);

    Topology topo = identify(st.mesh);
    std::vector<Vec2> vel = node_velocities(st.mesh, topo, kin, st.energy);
    advance_nodes(st.mesh, vel, dt, cfg.remesh);

    if (cfg.schedule.rex) {
        replay_grain_events(st, ev0);
        rex_update(st, cfg, seg, dt);
    }

    std::vector<int> surf_map;
    st.mesh.compact(surf_map);
    remap_surfaces(st, surf_map);

    st.time += dt;
    st.step_no += 1;
}

CriticalNow critical_now(const SimState& st, const SimConfig& cfg) {
    if (!cfg.schedule.rex) return {};
    const Segment& seg = cfg.schedule.segments[cfg.schedule.segment_at(st.time)];
    return critical_from(cfg, seg, st.strain);
}

const char* StatsRow::csv_header() {
    return "t,n_grains,mean_size_surface_weighted,rex_fraction,"
           "mean_rho_surface_weighted,Pc";
}

std::string StatsRow::csv() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g", t, n_grains,
                  mean_size, rex_fraction, mean_rho, pc);
    return buf;
}

StatsRow stats_row(const SimState& st, const SimConfig& cfg) {
    StatsRow r;
    r.t = st.time;
    Topology topo = identify(st.mesh);
    r.n_grains = topo.n_grains();
    double total = 0, wsize = 0, wrho = 0, rex_area = 0;
    for (const Surface& sf : topo.surfaces) {
        total += sf.area;
        wsize += sf.area * std::sqrt(sf.area / M_PI);
        if (sf.id < (int)st.grains.size()) {
            wrho += sf.area * st.grains[sf.id].rho;
            if (st.grains[sf.id].rex) rex_area += sf.area;
        }
    }
    if (total > 0) {
        r.mean_size = wsize / total;
        r.mean_rho = wrho / total;
        r.rex_fraction = rex_area / total;
    }
    CriticalNow cn = critical_now(st, cfg);
    if (cn.ok)
        for (const Surface& sf : topo.surfaces)
            if (sf.id < (int)st.grains.size() && st.grains[sf.id].rho >= cn.rho_c)
                r.pc += sf.perimeter;
    return r;
}

void run(SimState& st, const SimConfig& cfg, const RunIO& io, const RunHooks& hooks) {
    // `until` stops at the first step boundary at/past it rather than shrinking
    // the final step: every run then visits the same step grid, so a restarted
    // run is bit-identical to a straight one.
    const double t_total = cfg.schedule.total();
    double stop = io.until > 0 ? std::min(io.until, t_total) : t_total;
    const double dt = cfg.schedule.dt;
    const double eps = 1e-9 * dt;

    auto grid_index = [&](double every, double t) {
        return (long)std::floor((t + eps) / every);
    };
    long out_k = io.output_every > 0 ? grid_index(io.output_every, st.time) : 0;
    long snap_k = io.snapshot_every > 0 ? grid_index(io.snapshot_every, st.time) : 0;

    if (hooks.on_output) hooks.on_output(st);
    bool emitted = true;
    while (st.time < stop - eps) {
        int seg_i = cfg.schedule.segment_at(st.time);
        double seg_end = 0;
        for (int i = 0; i <= seg_i; ++i) seg_end += cfg.schedule.segments[i].duration;
        double dt_step = std::min({dt, seg_end - st.time, t_total - st.time});
        step(st, cfg, dt_step);

        emitted = false;
        if (hooks.on_output) {
            if (io.output_every <= 0) {
                hooks.on_output(st);
                emitted = true;
            } else {
                long k = grid_index(io.output_every, st.time);
                if (k > out_k) {
                    out_k = k;
                    hooks.on_output(st);
                    emitted = true;
                }
            }
        }
        if (hooks.on_snapshot && io.snapshot_every > 0) {
            long k = grid_index(io.snapshot_every, st.time);
            if (k > snap_k) {
                snap_k = k;
                hooks.on_snapshot(st);
            }
        }
    }
    if (hooks.on_output && !emitted) hooks.on_output(st);
}

namespace {

void put(std::ostream& out, double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", x);
    out << buf;
}

double take(std::istream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) throw Error(std::string("truncated snapshot: ") + what);
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        throw Error("bad number in snapshot: " + tok);
    return x;
}

long take_int(std::istream& in, const char* what) {
    long v;
    if (!(in >> v)) throw Error(std::string("truncated snapshot: ") + what);
    return v;
}

} // namespace

void save_state(const std::string& path, const SimState& st) {
    const Mesh& m = st.mesh;
    if (m.count_alive_nodes() != m.n_nodes() || m.count_alive_elems() != m.n_elems())
        throw Error("save_state: state is not compact");
    std::ofstream out(path);
    if (!out) throw Error("cannot write snapshot: " + path);
    out << "trmsnap 1\n";
    out << "time ";
    put(out, st.time);
    out << " " << st.step_no << " ";
    put(out, st.nucl_residual);
    out << "\nstrain ";
    put(out, st.strain.int_rate2);
    out << " ";
    put(out, st.strain.int_rate);
    out << "\ndomain " << m.domain.size() << "\n";
    for (const Vec2& p : m.domain) {
        put(out, p.x);
        out << " ";
        put(out, p.y);
        out << "\n";
    }
    out << "nodes " << m.n_nodes() << "\n";
    for (int n = 0; n < m.n_nodes(); ++n) {
        put(out, m.pos[n].x);
        out << " ";
        put(out, m.pos[n].y);
        out << "\n";
    }
    out << "elems " << m.n_elems() << "\n";
    for (int e = 0; e < m.n_elems(); ++e)
        out << m.tri[e][0] << " " << m.tri[e][1] << " " << m.tri[e][2] << " "
            << m.surf[e] << "\n";
    out << "grains " << st.grains.size() << "\n";
    for (const GrainState& g : st.grains) {
        put(out, g.rho);
        out << " ";
        put(out, g.area);
        out << " " << (g.rex ? 1 : 0) << " ";
        put(out, g.birth);
        out << "\n";
    }
    out << "energy " << st.energy.size() << "\n";
    for (double e : st.energy) {
        put(out, e);
        out << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

SimState load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "trmsnap" || version != 1)
        throw ConfigError("not a state snapshot: " + path);

    SimState st;
    std::string tag;
    in >> tag;
    if (tag != "time") throw ConfigError("bad snapshot: expected time");
    st.time = take(in, "time");
    st.step_no = take_int(in, "step");
    st.nucl_residual = take(in, "residual");
    in >> tag;
    if (tag != "strain") throw ConfigError("bad snapshot: expected strain");
    st.strain.int_rate2 = take(in, "strain");
    st.strain.int_rate = take(in, "strain");

    in >> tag;
    long nd = take_int(in, "domain count");
    if (tag != "domain") throw ConfigError("bad snapshot: expected domain");
    for (long i = 0; i < nd; ++i) {
        double x = take(in, "domain x"), y = take(in, "domain y");
        st.mesh.domain.push_back({x, y});
    }
    in >> tag;
    long nn = take_int(in, "node count");
    if (tag != "nodes") throw ConfigError("bad snapshot: expected nodes");
    for (long i = 0; i < nn; ++i) {
        double x = take(in, "x"), y = take(in, "y");
        st.mesh.add_node({x, y});
    }
    in >> tag;
    long ne = take_int(in, "elem count");
    if (tag != "elems") throw ConfigError("bad snapshot: expected elems");
    for (long i = 0; i < ne; ++i) {
        long a = take_int(in, "a"), b = take_int(in, "b"), c = take_int(in, "c");
        long s = take_int(in, "surf");
        st.mesh.add_element((int)a, (int)b, (int)c, (int)s);
    }
    in >> tag;
    long ng = take_int(in, "grain count");
    if (tag != "grains") throw ConfigError("bad snapshot: expected grains");
    for (long i = 0; i < ng; ++i) {
        GrainState g;
        g.rho = take(in, "rho");
        g.area = take(in, "area");
        g.rex = take_int(in, "rex") != 0;
        g.birth = take(in, "birth");
        st.grains.push_back(g);
    }
    in >> tag;
    long nen = take_int(in, "energy count");
    if (tag != "energy") throw ConfigError("bad snapshot: expected energy");
    for (long i = 0; i < nen; ++i) st.energy.push_back(take(in, "energy"));

    classify_nodes(st.mesh);
    ValidationReport rep = validate(st.mesh);
    if (!rep.ok()) throw InvariantError("snapshot mesh invalid: " + rep.str());
    return st;
}

} // namespace trm
