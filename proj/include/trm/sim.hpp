#pragma once

// Batch driver: owns the mesh + per-grain state, advances one global dt at a
// time (adaptation, junction decomposition, velocities, node advancement,
// then the recrystallization laws), and keeps everything restartable.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trm/config.hpp"
#include "trm/kinetics.hpp"
#include "trm/mesh.hpp"
#include "trm/remesh.hpp"
#include "trm/rex.hpp"
#include "trm/topology.hpp"

namespace trm {

struct SimState {
    Mesh mesh;
    std::vector<GrainState> grains;  // by surface id
    std::vector<double> energy;      // by surface id; tau*rho when rex is on
    double time = 0;
    long step_no = 0;
    double nucl_residual = 0;        // unused nucleation area budget
    StrainAccumulators strain;
    EventLog events;                 // whole-run history (diagnostic)
    RemeshStats last_remesh;
};

// deterministic per-step stream: reseeded from (seed, step) every step so
// restarts never need generator state
std::uint64_t substream(std::uint64_t seed, std::uint64_t step);

SimState init_state(const SimConfig& cfg);

// One time step of size dt (caller clamps dt to segment/run boundaries).
void step(SimState& st, const SimConfig& cfg, double dt);

struct StatsRow {
    double t = 0;
    int n_grains = 0;
    double mean_size = 0;     // surface-weighted equivalent-circle radius
    double rex_fraction = 0;  // area fraction of recrystallized grains
    double mean_rho = 0;      // surface-weighted dislocation density
    double pc = 0;            // boundary length of grains at/above rho_c

    static const char* csv_header();
    std::string csv() const;
};

StatsRow stats_row(const SimState& st, const SimConfig& cfg);

// critical density for the segment active at st.time; ok=false while no
// deformation has happened yet (nothing can nucleate)
struct CriticalNow {
    bool ok = false;
    double rho_c = 0;
    double r_star = 0;
    RateRow row{};
    bool deforming = false;
    double rate_eff = 0;
};
CriticalNow critical_now(const SimState& st, const SimConfig& cfg);

struct RunHooks {
    std::function<void(const SimState&)> on_output;    // at every output time
    std::function<void(const SimState&)> on_snapshot;  // at snapshot times
};

// Advance until min(io.until, schedule total). Emits on_output at entry and
// then per output_every crossing (every step when 0); on_snapshot per
// snapshot_every crossing.
void run(SimState& st, const SimConfig& cfg, const RunIO& io, const RunHooks& hooks);

// Bit-exact plain-text state snapshot (hex floats). The state must be
// compact, which every step() guarantees.
void save_state(const std::string& path, const SimState& st);
SimState load_state(const std::string& path);

} // namespace trm
