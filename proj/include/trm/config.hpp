#pragma once

// Plaintext run configuration: `[section]` headers, `key = value` entries,
// `#` comments. Repeated keys accumulate (table rows, schedule segments,
// per-surface assignments). All diagnostics carry line numbers.

#include <map>
#include <string>
#include <vector>

#include "trm/microgen.hpp"
#include "trm/remesh.hpp"
#include "trm/rex.hpp"

namespace trm {

struct ConfigFile {
    struct Entry {
        std::string key;
        std::string value;
        int line = -1;
    };
    std::map<std::string, std::vector<Entry>> sections;

    static ConfigFile parse(const std::string& text);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& section) const { return sections.count(section) != 0; }
    // single-valued lookup; throws on duplicates, def on absence (empty = required)
    std::string get(const std::string& section, const std::string& key,
                    const std::string& def = "", bool required = false) const;
    double get_num(const std::string& section, const std::string& key, double def) const;
    // every entry with this key, in file order
    std::vector<Entry> all(const std::string& section, const std::string& key) const;
};

struct Segment {
    double duration = 0;  // s
    double rate = 0;      // eps_dot_xx, 1/s; 0 marks a rest segment
    double T = 0;         // K (0: material default)
};

struct Schedule {
    std::vector<Segment> segments;
    double dt = 1e-5;
    bool capillarity = true;
    bool rex = false;

    double total() const;
    int segment_at(double t) const;  // last segment at t == total
    void check() const;
};

struct SimConfig {
    GeneratorSpec gen;
    MaterialParams mat = steel_304L();
    RemeshConfig remesh;
    Schedule schedule;

    // direct kinetic coefficients for runs without the material laws
    double mobility = 1.0;
    double gamma = 1.0;
    double delta = 1.0;

    std::uint64_t seed = 1;
    std::vector<double> init_energy;  // by surface id, rex off
    double default_energy = 0.0;
    std::vector<double> init_rho;     // by surface id, rex on
    double default_rho = -1.0;        // <0: mat.rho0
};

struct RunIO {
    std::string out_dir = "out";
    std::string restart;       // state snapshot to resume from (empty: generate)
    double until = -1;         // stop at the first step at/past this (<0: schedule total)
    double output_every = 0;   // 0: every step
    double snapshot_every = 0; // 0: only final
};

// Parses the full config; unknown sections/keys are errors.
void load_config(const std::string& path, SimConfig& sim, RunIO& io);

} // namespace trm
