#pragma once

// Mesh adaptation operators: node advancement with inversion guards, vertex
// smoothing, edge split/swap/collapse with boundary-aware rules, and
// decomposition of junctions with more than three incident boundary lines.
// Collapse runs in one of two modes:
//   Strict  - conventional rules only: plain-edge collapses must involve an
//             interior node, boundary collapses only between consecutive
//             nodes of the wireframe; anything that would change topology
//             (other than a grain vanishing outright) is rejected.
//   General - additionally merges non-consecutive boundary nodes across a
//             grain: the survivor lands on the pair barycenter, becomes a
//             junction when its adjacency says so, and a surface pinched in
//             two by the merge is split and relabeled.

#include <string>
#include <vector>

#include "trm/geometry.hpp"
#include "trm/kinetics.hpp"
#include "trm/mesh.hpp"

namespace trm {

struct RemeshConfig {
    double h = 0.01;           // target edge length
    double min_factor = 0.5;   // collapse edges below min_factor * h
    double max_factor = 1.41;  // split edges above max_factor * h
    double pp_factor = 0.15;   // junction-junction edges collapse below this * h
    double junction_arm = 0.2; // offset of the junction-split satellite, units of h
    double smooth_relax = 0.6; // relaxation toward the neighbor barycenter
    int max_halvings = 24;     // displacement halvings before freezing a node

    void check() const;  // throws Error on nonsensical values
};

enum class CollapseMode { Strict, General };

struct Event {
    enum class Kind {
        GrainDisappear,     // a = surface id
        GrainSplit,         // a = old surface id, b = new surface id
        JunctionCreate,     // a = node id promoted by a merge
        JunctionDecompose,  // a = junction node, b = satellite node
        LineSplit,          // a = node id where a line was cut
        Nucleate            // a = new surface id, b = seed node id
    };
    Kind kind;
    double time = 0.0;
    int a = -1;
    int b = -1;
};
using EventLog = std::vector<Event>;

std::string event_kind_name(Event::Kind k);

struct RemeshStats {
    int splits = 0;
    int collapses = 0;
    int rejected_collapses = 0;
    int swaps = 0;
    int smoothed = 0;
    int junction_splits = 0;
    int frozen_nodes = 0;
    int disappeared = 0;
    int grain_splits = 0;
};

// Move every node by vel*dt (halving the displacement of a node until its
// element star stays valid; frozen on cap). Hull nodes move only along their
// wall. Returns the number of frozen nodes.
int advance_nodes(Mesh& m, const std::vector<Vec2>& vel, double dt,
                  const RemeshConfig& cfg);

// One smoothing sweep: interior nodes relax toward the barycenter of their
// edge neighbors, boundary nodes slide only along their boundary, junctions
// and corners stay. Returns number of nodes moved.
int smooth_pass(Mesh& m, const RemeshConfig& cfg);

// Insert a node on edge (a,b) at its midpoint / at a given position on the
// edge. Incident elements are subdivided in place. Returns false if the edge
// is missing or a child element would be degenerate.
bool split_edge(Mesh& m, int a, int b, int& new_node);
bool split_edge_at(Mesh& m, int a, int b, const Vec2& p, int& new_node);

// Flip the diagonal of the two-element quad around (a,b). Only edges interior
// to one surface qualify; the flip must strictly improve the worst element
// quality. Returns whether the flip happened.
bool swap_edge(Mesh& m, int a, int b, int* nc = nullptr, int* nd = nullptr);

// Collapse edge (a,b) under the mode rules. Emits events (grain disappearance
// or split, junction creation) stamped with `time`. If `energy` is given it is
// kept aligned with surface ids when splits clone a grain. Returns whether the
// collapse happened.
bool collapse_edge(Mesh& m, int a, int b, CollapseMode mode, const RemeshConfig& cfg,
                   double time, EventLog& events, RemeshStats& stats,
                   std::vector<double>* energy);

// Decompose every junction with more than three incident line ends into
// three-way junctions, choosing at each step the adjacent line pair whose
// detachment lowers the boundary + bulk energy the most. Returns the number
// of decompositions performed.
int split_junctions(Mesh& m, const RemeshConfig& cfg, const Kinetics& kin,
                    const std::vector<double>& energy, double time, EventLog& events);

// Full adaptation pass: long-edge splits, short-edge collapses (+ zero-length
// cleanup), junction decomposition, quality swaps, smoothing.
RemeshStats remesh_pass(Mesh& m, const RemeshConfig& cfg, CollapseMode mode,
                        const Kinetics& kin, std::vector<double>& energy,
                        double time, EventLog& events);

} // namespace trm
