#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "trm/config.hpp"
#include "trm/error.hpp"
#include "trm/oracles.hpp"
#include "trm/sim.hpp"
#include "trm/vtk_io.hpp"

namespace fs = std::filesystem;
using namespace trm;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> surface_scalar(const SimState& st) {
    if (!st.grains.empty()) {
        std::vector<double> rho(st.mesh.next_surf, 0.0);
        for (int s = 0; s < st.mesh.next_surf && s < (int)st.grains.size(); ++s)
            rho[s] = st.grains[s].rho;
        return rho;
    }
    std::vector<double> e = st.energy;
    e.resize(st.mesh.next_surf, 0.0);
    return e;
}

void write_mesh_vtk(const fs::path& dir, const SimState& st) {
    char name[64];
    std::snprintf(name, sizeof name, "mesh_%06ld.vtk", st.step_no);
    VtkMeta meta;
    meta.time = st.time;
    meta.step = st.step_no;
    write_vtk((dir / name).string(), st.mesh, surface_scalar(st), meta);
}

void write_events_csv(const fs::path& dir, const EventLog& events) {
    std::ofstream out(dir / "events.csv");
    out << "time,kind,a,b\n";
    for (const Event& e : events)
        out << num(e.time) << "," << event_kind_name(e.kind) << "," << e.a << ","
            << e.b << "\n";
}

double tracked_area(const SimState& st, int surf) {
    double a = 0;
    for (int e = 0; e < st.mesh.n_elems(); ++e)
        if (st.mesh.elem_alive[e] && st.mesh.surf[e] == surf) a += st.mesh.area(e);
    return a;
}

// L2 misfit of the tracked-surface trace against the matching analytic curve
struct OracleTrace {
    enum class Kind { None, Circle, Wedge } kind = Kind::None;
    double de = 0, r0 = 0, a = 0, dt = 1e-5;
    bool cap = true;
    std::vector<double> ts, areas;

    void sample(const SimState& st) {
        int surf = kind == Kind::Circle ? 1 : 0;
        if (st.mesh.next_surf <= surf) return;
        ts.push_back(st.time);
        areas.push_back(tracked_area(st, surf));
    }

    bool report(double& l2, int& used) const {
        if (kind == Kind::None || ts.empty()) return false;
        std::vector<double> ref(ts.size());
        size_t n = 0;
        if (kind == Kind::Circle) {
            double t_last = ts.back();
            OracleCurve c = circle_surface_ode(r0, de, dt / 20.0, t_last * (1 + 1e-9), 0.0);
            size_t j = 0;
            for (size_t i = 0; i < ts.size(); ++i) {
                while (j + 1 < c.t.size() && c.t[j + 1] <= ts[i]) ++j;
                if (j + 1 >= c.t.size()) {
                    ref[i] = c.value.back();
                } else {
                    double w = (ts[i] - c.t[j]) / (c.t[j + 1] - c.t[j]);
                    ref[i] = c.value[j] + w * (c.value[j + 1] - c.value[j]);
                }
                ++n;
            }
        } else {
            if (!(de > 0)) return false;
            double t_c = a / (4.0 * de);
            for (size_t i = 0; i < ts.size(); ++i) {
                if (ts[i] > t_c * (1 + 1e-9)) break;
                ref[i] = triple_junction_surface(ts[i], a, de, cap);
                ++n;
            }
        }
        if (n == 0) return false;
        double se = 0, ss = 0;
        for (size_t i = 0; i < n; ++i) {
            se += (areas[i] - ref[i]) * (areas[i] - ref[i]);
            ss += ref[i] * ref[i];
        }
        if (!(ss > 0)) return false;
        l2 = std::sqrt(se / ss);
        used = (int)n;
        return true;
    }
};

int cmd_generate(const std::string& config, const std::string& out_flag,
                 long seed_flag) {
    SimConfig cfg;
    RunIO io;
    load_config(config, cfg, io);
    if (!out_flag.empty()) io.out_dir = out_flag;
    if (seed_flag >= 0) cfg.seed = (std::uint64_t)seed_flag;

    SimState st = init_state(cfg);
    fs::create_directories(io.out_dir);
    write_mesh_vtk(io.out_dir, st);
    save_state((fs::path(io.out_dir) / "state_000000.txt").string(), st);

    Topology topo = identify(st.mesh);
    std::printf("generated: %d nodes, %d elements, %d grains -> %s\n",
                st.mesh.count_alive_nodes(), st.mesh.count_alive_elems(),
                topo.n_grains(), io.out_dir.c_str());
    return 0;
}

int cmd_run(const std::string& config, const std::string& out_flag, long seed_flag,
            double until_flag, double out_every_flag, double snap_every_flag) {
    SimConfig cfg;
    RunIO io;
    load_config(config, cfg, io);
    if (!out_flag.empty()) io.out_dir = out_flag;
    if (seed_flag >= 0) cfg.seed = (std::uint64_t)seed_flag;
    if (until_flag > 0) io.until = until_flag;
    if (out_every_flag > 0) io.output_every = out_every_flag;
    if (snap_every_flag > 0) io.snapshot_every = snap_every_flag;

    bool restarting = !io.restart.empty();
    SimState st = restarting ? load_state(io.restart) : init_state(cfg);

    fs::path dir(io.out_dir);
    fs::create_directories(dir);
    std::ofstream stats(dir / "stats.csv", restarting ? std::ios::app : std::ios::out);
    if (!restarting) stats << StatsRow::csv_header() << "\n";

    OracleTrace trace;
    if (!cfg.schedule.rex && !restarting) {
        if (cfg.gen.preset == GeneratorSpec::Preset::Circle && st.energy.size() >= 2) {
            trace.kind = OracleTrace::Kind::Circle;
            trace.de = st.energy[0] - st.energy[1];
            trace.r0 = cfg.gen.r0;
        } else if (cfg.gen.preset == GeneratorSpec::Preset::TripleJunction &&
                   st.energy.size() >= 3) {
            trace.kind = OracleTrace::Kind::Wedge;
            trace.de = 0.5 * (st.energy[1] + st.energy[2]) - st.energy[0];
            trace.a = cfg.gen.a;
            trace.cap = cfg.schedule.capillarity;
        }
        trace.dt = cfg.schedule.dt;
    }

    bool skip_first = restarting;  // the previous leg already logged this time
    RunHooks hooks;
    hooks.on_output = [&](const SimState& s) {
        if (skip_first) {
            skip_first = false;
            return;
        }
        stats << stats_row(s, cfg).csv() << "\n";
        stats.flush();
        write_mesh_vtk(dir, s);
        trace.sample(s);
    };
    hooks.on_snapshot = [&](const SimState& s) {
        char name[64];
        std::snprintf(name, sizeof name, "state_%06ld.txt", s.step_no);
        save_state((dir / name).string(), s);
    };

    run(st, cfg, io, hooks);

    save_state((dir / "state_final.txt").string(), st);
    write_events_csv(dir, st.events);

    Topology topo = identify(st.mesh);
    std::printf("run finished: t=%s steps=%ld grains=%d\n", num(st.time).c_str(),
                st.step_no, topo.n_grains());
    double l2 = 0;
    int used = 0;
    if (trace.report(l2, used)) {
        std::ofstream rep(dir / "oracle_l2.txt");
        rep << "samples " << used << "\nl2 " << num(l2) << "\n";
        std::printf("analytic misfit: l2=%s over %d samples\n", num(l2).c_str(), used);
    }
    return 0;
}

int cmd_oracle(const std::string& kind, double r0, double de, double a, double dt,
               double until, bool no_cap, const std::string& out_path) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot write: " + out_path);
        os = &file;
    }
    if (kind == "circle") {
        OracleCurve c = circle_surface_ode(r0, de, dt, until, 0.0);
        *os << "t,S\n";
        for (size_t i = 0; i < c.t.size(); ++i)
            *os << num(c.t[i]) << "," << num(c.value[i]) << "\n";
    } else if (kind == "circle_metastable") {
        *os << num(circle_metastable_de(r0)) << "\n";
    } else if (kind == "triple_junction") {
        if (!(de > 0)) throw ConfigError("triple_junction oracle needs de > 0");
        double t_c = a / (4.0 * de);
        double t_end = until > 0 ? std::min(until, t_c) : t_c;
        int steps = (int)std::floor(t_end / dt + 1e-9);
        *os << "t,S\n";
        for (int i = 0; i <= steps; ++i) {
            double t = std::min(i * dt, t_end);
            *os << num(t) << "," << num(triple_junction_surface(t, a, de, !no_cap))
                << "\n";
        }
    } else {
        throw ConfigError("unknown oracle kind '" + kind + "'");
    }
    return 0;
}

int cmd_validate(const std::string& config, const std::string& state) {
    SimState st;
    if (!state.empty()) {
        st = load_state(state);
    } else if (!config.empty()) {
        SimConfig cfg;
        RunIO io;
        load_config(config, cfg, io);
        st = init_state(cfg);
    } else {
        throw ConfigError("validate needs --config or --state");
    }
    ValidationReport rep = validate(st.mesh);
    Topology topo = identify(st.mesh);
    if (!rep.ok()) {
        std::printf("INVALID\n%s", rep.str().c_str());
        throw InvariantError("mesh validation failed");
    }
    std::printf("OK: %d nodes, %d elements, %d grains\n",
                st.mesh.count_alive_nodes(), st.mesh.count_alive_elems(),
                topo.n_grains());
    return 0;
}

int cmd_stats(const std::string& state, const std::string& config) {
    SimConfig cfg;
    RunIO io;
    if (!config.empty()) load_config(config, cfg, io);
    SimState st = load_state(state);
    std::printf("%s\n%s\n", StatsRow::csv_header(), stats_row(st, cfg).csv().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"front-tracking grain-structure simulator"};
    app.require_subcommand(1);

    std::string config, out_dir, state_path;
    long seed = -1;
    double until = -1, output_every = -1, snapshot_every = -1;

    CLI::App* gen = app.add_subcommand("generate", "build the initial structure");
    gen->add_option("--config", config, "run configuration")->required();
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--seed", seed, "override the run seed");

    CLI::App* runc = app.add_subcommand("run", "advance the structure in time");
    runc->add_option("--config", config, "run configuration")->required();
    runc->add_option("--out", out_dir, "output directory");
    runc->add_option("--seed", seed, "override the run seed");
    runc->add_option("--until", until, "stop at the first step at/past this time");
    runc->add_option("--output-every", output_every, "stats/mesh output interval");
    runc->add_option("--snapshot-every", snapshot_every, "state snapshot interval");

    std::string okind = "circle";
    double o_r0 = 0.3, o_de = 0, o_a = 1.0, o_dt = 1e-5, o_until = 0.05;
    bool o_nocap = false;
    std::string o_out;
    CLI::App* orc = app.add_subcommand("oracle", "print analytic reference curves");
    orc->add_option("--kind", okind, "circle | circle_metastable | triple_junction");
    orc->add_option("--r0", o_r0, "initial disc radius");
    orc->add_option("--de", o_de, "stored-energy jump");
    orc->add_option("--a", o_a, "triangle side");
    orc->add_option("--dt", o_dt, "sample spacing");
    orc->add_option("--until", o_until, "end time");
    orc->add_flag("--no-capillarity", o_nocap, "drop the curvature contribution");
    orc->add_option("--out", o_out, "write CSV here instead of stdout");

    CLI::App* val = app.add_subcommand("validate", "check structural invariants");
    val->add_option("--config", config, "generate from this configuration");
    val->add_option("--state", state_path, "check this snapshot instead");

    CLI::App* sts = app.add_subcommand("stats", "one summary row for a snapshot");
    sts->add_option("--state", state_path, "state snapshot")->required();
    sts->add_option("--config", config, "configuration (for material context)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(config, out_dir, seed);
        if (runc->parsed())
            return cmd_run(config, out_dir, seed, until, output_every, snapshot_every);
        if (orc->parsed())
            return cmd_oracle(okind, o_r0, o_de, o_a, o_dt, o_until, o_nocap, o_out);
        if (val->parsed()) return cmd_validate(config, state_path);
        if (sts->parsed()) return cmd_stats(state_path, config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InvariantError& e) {
        std::fprintf(stderr, "invariant error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
