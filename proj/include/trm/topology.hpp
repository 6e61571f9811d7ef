#pragma once

// Derived wireframe view of the mesh: junction Points, boundary Lines (ordered
// node paths), and grain Surfaces. Rebuilt from the mesh whenever operators
// change connectivity; never edited directly.

#include <functional>
#include <string>
#include <vector>

#include "trm/mesh.hpp"

namespace trm {

struct Line {
    int id = -1;
    std::vector<int> nodes;  // open: [junction, interface..., junction]; closed: cycle from anchor
    bool closed = false;
    int p0 = -1, p1 = -1;    // endpoint Point indices, -1 when closed
    int surf_left = kExterior;   // relative to walking nodes[i] -> nodes[i+1]
    int surf_right = kExterior;
    double length = 0.0;

    bool exterior() const { return surf_left == kExterior || surf_right == kExterior; }
};

struct Point {
    int node = -1;
    std::vector<int> lines;      // incident line ids, CCW by departure direction
    std::vector<int> neighbors;  // adjacent node along each incident line (same order)
};

struct Surface {
    int id = -1;
    std::vector<int> elems;
    std::vector<int> lines;
    std::vector<int> points;
    double area = 0.0;
    double perimeter = 0.0;  // interior boundary only (exterior lines excluded)
};

struct Topology {
    std::vector<Point> points;
    std::vector<Line> lines;
    std::vector<Surface> surfaces;
    std::vector<int> surf_index;  // surface id -> index into surfaces, -1 if absent
    std::vector<int> node_point;  // node -> Point index, -1
    std::vector<int> node_line;   // node -> Line id for interface nodes, -1

    const Surface* surface(int surf_id) const {
        if (surf_id < 0 || surf_id >= static_cast<int>(surf_index.size())) return nullptr;
        int k = surf_index[surf_id];
        return k < 0 ? nullptr : &surfaces[k];
    }
    int n_grains() const { return static_cast<int>(surfaces.size()); }
};

// Build the wireframe from a classified mesh. Throws InvariantError when the
// stored classification and the element adjacency disagree.
Topology identify(const Mesh& m);

// Flood fill over elements starting at `seed`; `blocked(ea, eb, na, nb)`
// returning true stops the crossing from element ea to eb over edge (na,nb).
std::vector<int> flood_elements(
    const Mesh& m, int seed,
    const std::function<bool(int, int, int, int)>& blocked);

// Connected components of one surface under same-surface element adjacency,
// each sorted ascending; component containing the lowest element id first.
std::vector<std::vector<int>> surface_components(const Mesh& m, int s);

struct Violation {
    std::string what;
    int id = -1;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string str() const;
};

// Full consistency audit: element sanity, classification against adjacency,
// wireframe connectivity, and the area partition against the domain polygon.
ValidationReport validate(const Mesh& m);

} // namespace trm
