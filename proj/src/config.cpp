#include "trm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "trm/error.hpp"

namespace trm {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& v, int line) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + v + "'", line);
    }
}

std::vector<double> parse_nums(const std::string& v, int line) {
    std::istringstream in(v);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_num(tok, line));
    return out;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("expected on/off: '" + v + "'", line);
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cf;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            cf.sections[section];  // allow empty sections
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        if (section.empty()) throw ConfigError("entry before any [section]", line_no);
        Entry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty()) throw ConfigError("empty key", line_no);
        cf.sections[section].push_back(e);
    }
    return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& def, bool required) const {
    auto it = sections.find(section);
    const Entry* found = nullptr;
    if (it != sections.end()) {
        for (const Entry& e : it->second) {
            if (e.key != key) continue;
            if (found) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", e.line);
            found = &e;
        }
    }
    if (found) return found->value;
    if (required) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return def;
}

double ConfigFile::get_num(const std::string& section, const std::string& key,
                           double def) const {
    std::string v = get(section, key);
    if (v.empty()) return def;
    auto it = sections.find(section);
    int line = -1;
    for (const Entry& e : it->second)
        if (e.key == key) line = e.line;
    return parse_num(v, line);
}

std::vector<ConfigFile::Entry> ConfigFile::all(const std::string& section,
                                               const std::string& key) const {
    std::vector<Entry> out;
    auto it = sections.find(section);
    if (it == sections.end()) return out;
    for (const Entry& e : it->second)
        if (e.key == key) out.push_back(e);
    return out;
}

double Schedule::total() const {
    double t = 0;
    for (const Segment& s : segments) t += s.duration;
    return t;
}

int Schedule::segment_at(double t) const {
    double acc = 0;
    for (size_t i = 0; i < segments.size(); ++i) {
        acc += segments[i].duration;
        if (t < acc - 1e-15 * std::max(1.0, acc)) return (int)i;
    }
    return (int)segments.size() - 1;
}

void Schedule::check() const {
    if (segments.empty()) throw ConfigError("schedule has no segments");
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    for (const Segment& s : segments) {
        if (!(s.duration > 0)) throw ConfigError("segment durations must be positive");
        if (dt > s.duration + 1e-15)
            throw ConfigError("dt exceeds a segment duration");
    }
}

namespace {

void check_known_keys(const ConfigFile& cf, const std::string& section,
                      const std::set<std::string>& known) {
    auto it = cf.sections.find(section);
    if (it == cf.sections.end()) return;
    for (const auto& e : it->second)
        if (!known.count(e.key))
            throw ConfigError("unknown key '" + e.key + "' in [" + section + "]", e.line);
}

} // namespace

void load_config(const std::string& path, SimConfig& sim, RunIO& io) {
    ConfigFile cf = ConfigFile::parse_file(path);

    static const std::set<std::string> known_sections = {
        "domain", "material", "kinetics", "energy", "rho",
        "sim", "remesh", "schedule", "restart"};
    for (const auto& [name, entries] : cf.sections) {
        (void)entries;
        if (!known_sections.count(name)) throw ConfigError("unknown section [" + name + "]");
    }

    // ---- domain ----
    check_known_keys(cf, "domain", {"preset", "lo", "hi", "h", "r0", "a", "n",
                                    "gen_seed", "weights"});
    std::string preset = cf.get("domain", "preset", "", !cf.has("restart"));
    if (!preset.empty()) {
        if (preset == "circle") sim.gen.preset = GeneratorSpec::Preset::Circle;
        else if (preset == "triple_junction") sim.gen.preset = GeneratorSpec::Preset::TripleJunction;
        else if (preset == "six_grain") sim.gen.preset = GeneratorSpec::Preset::SixGrain;
        else if (preset == "laguerre") sim.gen.preset = GeneratorSpec::Preset::Laguerre;
        else throw ConfigError("unknown preset '" + preset + "'");
    }
    auto get_vec2 = [&](const std::string& key, Vec2 def) {
        std::string v = cf.get("domain", key);
        if (v.empty()) return def;
        std::vector<double> xs = parse_nums(v, -1);
        if (xs.size() != 2) throw ConfigError("'" + key + "' needs two numbers");
        return Vec2{xs[0], xs[1]};
    };
    sim.gen.lo = get_vec2("lo", sim.gen.lo);
    sim.gen.hi = get_vec2("hi", sim.gen.hi);
    sim.gen.h = cf.get_num("domain", "h", sim.gen.h);
    sim.gen.r0 = cf.get_num("domain", "r0", sim.gen.r0);
    sim.gen.a = cf.get_num("domain", "a", sim.gen.a);
    sim.gen.n = (int)cf.get_num("domain", "n", sim.gen.n);
    sim.gen.seed = (std::uint64_t)cf.get_num("domain", "gen_seed", (double)sim.gen.seed);
    {
        std::string w = cf.get("domain", "weights");
        if (!w.empty()) sim.gen.weights = parse_nums(w, -1);
    }

    // ---- material ----
    check_known_keys(cf, "material", {"M0", "Q", "R", "T", "gamma", "tau", "Ks",
                                      "rho0", "omega", "b", "conv", "delta_rest", "row"});
    sim.mat = steel_304L();
    sim.mat.M0 = cf.get_num("material", "M0", sim.mat.M0);
    sim.mat.Q = cf.get_num("material", "Q", sim.mat.Q);
    sim.mat.R = cf.get_num("material", "R", sim.mat.R);
    sim.mat.T = cf.get_num("material", "T", sim.mat.T);
    sim.mat.gamma = cf.get_num("material", "gamma", sim.mat.gamma);
    sim.mat.tau = cf.get_num("material", "tau", sim.mat.tau);
    sim.mat.Ks = cf.get_num("material", "Ks", sim.mat.Ks);
    sim.mat.rho0 = cf.get_num("material", "rho0", sim.mat.rho0);
    sim.mat.omega = cf.get_num("material", "omega", sim.mat.omega);
    sim.mat.b_dim = cf.get_num("material", "b", sim.mat.b_dim);
    sim.mat.conv = cf.get_num("material", "conv", sim.mat.conv);
    sim.mat.delta_rest = cf.get_num("material", "delta_rest", sim.mat.delta_rest);
    {
        auto rows = cf.all("material", "row");
        if (!rows.empty()) {
            sim.mat.table.clear();
            for (const auto& e : rows) {
                std::vector<double> xs = parse_nums(e.value, e.line);
                if (xs.size() != 5)
                    throw ConfigError("row needs: rate K1 K2 Kg delta", e.line);
                sim.mat.table.push_back({xs[0], xs[1], xs[2], xs[3], xs[4]});
            }
        }
    }
    sim.mat.check();

    // ---- kinetics (direct coefficients for non-rex runs) ----
    check_known_keys(cf, "kinetics", {"mobility", "gamma", "delta", "capillarity"});
    sim.mobility = cf.get_num("kinetics", "mobility", sim.mobility);
    sim.gamma = cf.get_num("kinetics", "gamma", sim.gamma);
    sim.delta = cf.get_num("kinetics", "delta", sim.delta);
    {
        std::string c = cf.get("kinetics", "capillarity");
        if (!c.empty()) sim.schedule.capillarity = parse_bool(c, -1);
    }

    // ---- per-surface assignments ----
    check_known_keys(cf, "energy", {"default", "surf"});
    check_known_keys(cf, "rho", {"default", "surf"});
    sim.default_energy = cf.get_num("energy", "default", sim.default_energy);
    sim.default_rho = cf.get_num("rho", "default", sim.default_rho);
    auto read_surf_list = [&](const std::string& section, std::vector<double>& out,
                              double fill) {
        for (const auto& e : cf.all(section, "surf")) {
            std::vector<double> xs = parse_nums(e.value, e.line);
            if (xs.size() != 2 || xs[0] < 0 || xs[0] != std::floor(xs[0]))
                throw ConfigError("surf needs: <id> <value>", e.line);
            int id = (int)xs[0];
            if (id >= (int)out.size()) out.resize(id + 1, fill);
            out[id] = xs[1];
        }
    };
    read_surf_list("energy", sim.init_energy, sim.default_energy);
    read_surf_list("rho", sim.init_rho, sim.default_rho);

    // ---- sim ----
    check_known_keys(cf, "sim", {"dt", "seed", "rex", "out", "until",
                                 "output_every", "snapshot_every"});
    sim.schedule.dt = cf.get_num("sim", "dt", sim.schedule.dt);
    sim.seed = (std::uint64_t)cf.get_num("sim", "seed", (double)sim.seed);
    {
        std::string r = cf.get("sim", "rex");
        if (!r.empty()) sim.schedule.rex = parse_bool(r, -1);
    }
    io.out_dir = cf.get("sim", "out", io.out_dir);
    io.until = cf.get_num("sim", "until", io.until);
    io.output_every = cf.get_num("sim", "output_every", io.output_every);
    io.snapshot_every = cf.get_num("sim", "snapshot_every", io.snapshot_every);

    // ---- remesh ----
    check_known_keys(cf, "remesh", {"h", "min_factor", "max_factor", "pp_factor",
                                    "junction_arm", "smooth_relax", "max_halvings"});
    sim.remesh.h = cf.get_num("remesh", "h", sim.gen.h);
    sim.remesh.min_factor = cf.get_num("remesh", "min_factor", sim.remesh.min_factor);
    sim.remesh.max_factor = cf.get_num("remesh", "max_factor", sim.remesh.max_factor);
    sim.remesh.pp_factor = cf.get_num("remesh", "pp_factor", sim.remesh.pp_factor);
    sim.remesh.junction_arm = cf.get_num("remesh", "junction_arm", sim.remesh.junction_arm);
    sim.remesh.smooth_relax = cf.get_num("remesh", "smooth_relax", sim.remesh.smooth_relax);
    sim.remesh.max_halvings = (int)cf.get_num("remesh", "max_halvings", sim.remesh.max_halvings);
    sim.remesh.check();

    // ---- schedule ----
    check_known_keys(cf, "schedule", {"segment"});
    for (const auto& e : cf.all("schedule", "segment")) {
        std::vector<double> xs = parse_nums(e.value, e.line);
        if (xs.size() != 2 && xs.size() != 3)
            throw ConfigError("segment needs: duration rate [T]", e.line);
        Segment s;
        s.duration = xs[0];
        s.rate = xs[1];
        s.T = xs.size() == 3 ? xs[2] : sim.mat.T;
        sim.schedule.segments.push_back(s);
    }
    if (sim.schedule.segments.empty()) {
        double until = io.until > 0 ? io.until : 1.0;
        sim.schedule.segments.push_back({until, 0.0, sim.mat.T});
    }
    sim.schedule.check();

    // ---- restart ----
    check_known_keys(cf, "restart", {"snapshot"});
    io.restart = cf.get("restart", "snapshot");
}

} // namespace trm
