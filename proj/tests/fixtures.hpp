#pragma once

// Hand-built meshes used across the unit tests.

#include <cmath>
#include <vector>

#include "trm/mesh.hpp"

namespace trm::fixtures {

inline Mesh make_mesh(const std::vector<Vec2>& pts,
                      const std::vector<std::array<int, 3>>& tris,
                      const std::vector<int>& surfs,
                      const std::vector<Vec2>& domain) {
    Mesh m;
    m.domain = domain;
    for (const auto& p : pts) m.add_node(p);
    for (size_t i = 0; i < tris.size(); ++i)
        m.add_element(tris[i][0], tris[i][1], tris[i][2], surfs[i]);
    classify_nodes(m);
    return m;
}

// Unit square split at x = 0.5 into two grains (surf 0 left, surf 1 right).
inline Mesh two_grains() {
    std::vector<Vec2> pts = {{0, 0}, {0.5, 0}, {1, 0}, {0, 1}, {0.5, 1}, {1, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}};
    std::vector<int> surfs = {0, 0, 1, 1};
    return make_mesh(pts, tris, surfs, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

// Disc grain (surf 1) of radius r centred in the unit square (surf 0):
// 1 centre node, 8 ring nodes, 8 hull nodes. 24 elements.
inline Mesh disc_in_square(double r = 0.2) {
    std::vector<Vec2> pts;
    pts.push_back({0.5, 0.5});  // 0: centre
    for (int i = 0; i < 8; ++i) {
        double a = i * M_PI / 4.0;
        pts.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});  // 1..8: ring
    }
    const std::vector<Vec2> hullpts = {{1, 0.5}, {1, 1}, {0.5, 1}, {0, 1},
                                       {0, 0.5}, {0, 0}, {0.5, 0}, {1, 0}};
    for (const auto& p : hullpts) pts.push_back(p);  // 9..16
    std::vector<std::array<int, 3>> tris;
    std::vector<int> surfs;
    for (int i = 0; i < 8; ++i) {
        int ri = 1 + i, rj = 1 + (i + 1) % 8;
        tris.push_back({0, ri, rj});
        surfs.push_back(1);
        int bi = 9 + i, bj = 9 + (i + 1) % 8;
        tris.push_back({ri, bi, bj});
        surfs.push_back(0);
        tris.push_back({ri, bj, rj});
        surfs.push_back(0);
    }
    return make_mesh(pts, tris, surfs, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

// Disc grain (surf 1, radius r_in) inside a k-gon domain (surf 0, radius
// r_out), centred at the origin. One fan node, k ring nodes, k outer nodes
// that are all domain-polygon vertices.
inline Mesh ring_in_polygon(int k, double r_in, double r_out) {
    std::vector<Vec2> pts;
    std::vector<Vec2> dom;
    pts.push_back({0, 0});
    for (int i = 0; i < k; ++i) {
        double a = i * 2.0 * M_PI / k;
        pts.push_back({r_in * std::cos(a), r_in * std::sin(a)});
    }
    for (int i = 0; i < k; ++i) {
        double a = i * 2.0 * M_PI / k;
        Vec2 p{r_out * std::cos(a), r_out * std::sin(a)};
        pts.push_back(p);
        dom.push_back(p);
    }
    std::vector<std::array<int, 3>> tris;
    std::vector<int> surfs;
    for (int i = 0; i < k; ++i) {
        int ri = 1 + i, rj = 1 + (i + 1) % k;
        int bi = 1 + k + i, bj = 1 + k + (i + 1) % k;
        tris.push_back({0, ri, rj});
        surfs.push_back(1);
        tris.push_back({ri, bi, bj});
        surfs.push_back(0);
        tris.push_back({ri, bj, rj});
        surfs.push_back(0);
    }
    return make_mesh(pts, tris, surfs, dom);
}

// Three grains meeting at the centre of a hexagonal domain. Boundary rays
// leave the centre at 270, 30 and 150 degrees; sector surf ids are
// 0 (right, 270..30), 1 (top, 30..150), 2 (left, 150..270).
inline Mesh three_sector_hex(double r = 1.0) {
    std::vector<Vec2> pts = {{0, 0}};
    std::vector<Vec2> dom;
    for (int i = 0; i < 6; ++i) {
        double a = (270.0 + 60.0 * i) * M_PI / 180.0;
        Vec2 p{r * std::cos(a), r * std::sin(a)};
        pts.push_back(p);
        dom.push_back(p);
    }
    std::vector<std::array<int, 3>> tris;
    std::vector<int> surfs;
    for (int i = 0; i < 6; ++i) {
        tris.push_back({0, 1 + i, 1 + (i + 1) % 6});
        surfs.push_back(i / 2);
    }
    return make_mesh(pts, tris, surfs, dom);
}

// Three grains meeting at the centre of an octagonal domain with boundary
// rays at 0, 90 and 225 degrees (so the junction is out of balance).
// Sector surf ids: 0 (0..90), 1 (90..225), 2 (225..360).
inline Mesh three_sector_octagon(double r = 1.0) {
    std::vector<Vec2> pts = {{0, 0}};
    std::vector<Vec2> dom;
    for (int i = 0; i < 8; ++i) {
        double a = 45.0 * i * M_PI / 180.0;
        Vec2 p{r * std::cos(a), r * std::sin(a)};
        pts.push_back(p);
        dom.push_back(p);
    }
    std::vector<std::array<int, 3>> tris;
    std::vector<int> surfs;
    const int sector[8] = {0, 0, 1, 1, 1, 2, 2, 2};
    for (int i = 0; i < 8; ++i) {
        tris.push_back({0, 1 + i, 1 + (i + 1) % 8});
        surfs.push_back(sector[i]);
    }
    return make_mesh(pts, tris, surfs, dom);
}

} // namespace trm::fixtures
