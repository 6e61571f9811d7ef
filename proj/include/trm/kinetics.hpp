#pragma once

// Node velocities for boundary migration. Interface nodes move with the
// local boundary; junction nodes follow multi-line force balances; wall
// junctions slide along the domain edge; corner junctions stay put.

#include <vector>

#include "trm/geometry.hpp"
#include "trm/mesh.hpp"
#include "trm/topology.hpp"

namespace trm {

struct Kinetics {
    double mobility = 1.0;    // boundary mobility
    double gamma = 1.0;       // boundary energy per unit length
    double delta = 1.0;       // velocity coefficient for the bulk driving force
    bool capillarity = true;  // include the curvature term
    // Half-width (arclength) of a triangular window that averages the nodal
    // curvature along each line before it is used. 0 = pointwise values.
    // Node-spacing-scale wiggles in the curvature read-out feed back on
    // themselves under an explicit update; averaging over a few spacings
    // removes them while leaving any resolved shape (constant-curvature arcs
    // in particular) unchanged.
    double curv_window = 0.0;
};

// per-grain driving energy; the exterior pseudo-surface (and any id the
// table does not cover yet) counts as zero
inline double grain_energy(const std::vector<double>& energy, int surf) {
    if (surf < 0 || surf >= static_cast<int>(energy.size())) return 0.0;
    return energy[surf];
}

// Velocity of every node. Bulk nodes and wall interface nodes get zero
// (they are repositioned by smoothing, not by physics). energy is indexed
// by surface id.
std::vector<Vec2> node_velocities(const Mesh& m, const Topology& topo,
                                  const Kinetics& kin,
                                  const std::vector<double>& energy);

} // namespace trm
