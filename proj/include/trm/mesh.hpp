#pragma once

// Triangle mesh kernel. Grain interiors are meshed; interfaces between grains
// exist only as element edges whose two sides carry different surface ids.
// The mesh (positions, triangles, per-element surface id) is the single source
// of truth; node classification and the wireframe topology are derived from it.

#include <array>
#include <cstdint>
#include <vector>

#include "trm/geometry.hpp"

namespace trm {

// Pseudo surface id for the outside of the domain.
constexpr int kExterior = -1;

// Node classification by local topology:
//   Bulk      - all incident elements belong to one grain, node not on the hull
//   Interface - exactly two regions meet (grain/grain, or grain/exterior)
//   Junction  - three or more regions meet; domain corners are junctions too
enum class NodeKind : std::uint8_t { Bulk = 0, Interface = 1, Junction = 2 };

struct Mesh {
    // nodes
    std::vector<Vec2> pos;
    std::vector<std::uint8_t> node_alive;
    std::vector<NodeKind> kind;
    std::vector<std::uint8_t> hull;    // node touches a hull edge
    std::vector<std::uint8_t> corner;  // node sits on a domain polygon vertex
    std::vector<std::vector<int>> star; // incident alive elements, maintained

    // elements (CCW)
    std::vector<std::array<int, 3>> tri;
    std::vector<int> surf;
    std::vector<std::uint8_t> elem_alive;

    int next_surf = 0;            // surface id allocator
    std::vector<Vec2> domain;     // CCW polygon bounding the domain

    // ---- construction ----
    int add_node(const Vec2& p);
    int add_element(int a, int b, int c, int s);
    void remove_element(int e);
    int alloc_surf() { return next_surf++; }

    // ---- basic queries ----
    int n_nodes() const { return static_cast<int>(pos.size()); }
    int n_elems() const { return static_cast<int>(tri.size()); }
    int count_alive_nodes() const;
    int count_alive_elems() const;

    double area(int e) const {
        const auto& t = tri[e];
        return tri_area(pos[t[0]], pos[t[1]], pos[t[2]]);
    }
    Vec2 centroid(int e) const {
        const auto& t = tri[e];
        return (pos[t[0]] + pos[t[1]] + pos[t[2]]) / 3.0;
    }
    double quality(int e) const {
        const auto& t = tri[e];
        return tri_quality(pos[t[0]], pos[t[1]], pos[t[2]]);
    }
    bool elem_has(int e, int n) const {
        const auto& t = tri[e];
        return t[0] == n || t[1] == n || t[2] == n;
    }
    int opposite_node(int e, int a, int b) const;

    // Elements sharing edge (a,b); writes up to 2 ids, returns the count.
    int edge_elems(int a, int b, std::array<int, 2>& out) const;

    // Surface ids on the two sides of edge (a,b); kExterior for the hull side.
    // Returns false if (a,b) is not an edge of the mesh.
    bool edge_surfs(int a, int b, int& s0, int& s1) const;

    bool is_interface_edge(int a, int b) const {
        int s0, s1;
        if (!edge_surfs(a, b, s0, s1)) return false;
        return s0 != s1;
    }

    double total_area() const;
    double domain_area() const { return polygon_area(domain); }

    // Index of the domain polygon edge the node lies on (hull nodes only),
    // -1 if interior, -2 if on a polygon vertex (corner).
    int wall_of(int n, double tol) const;
    int wall_of_point(const Vec2& p, double tol) const;

    // Replace node `from` by `to` inside element e (keeps orientation slot).
    void relabel_node(int e, int from, int to);

    void remove_node(int n);

    // Dense renumbering of nodes/elements/surfaces, order preserving.
    // Fills the old->new surface id map so grain bookkeeping can follow.
    void compact(std::vector<int>& surf_map);
};

// Classification a node should have, derived from element adjacency only.
NodeKind expected_kind(const Mesh& m, int n, bool& on_hull, bool& is_corner);

// Recompute kind/hull/corner for every alive node from element adjacency.
void classify_nodes(Mesh& m);

// Same, restricted to one node (used by local remesh operators).
void classify_node(Mesh& m, int n);

} // namespace trm
