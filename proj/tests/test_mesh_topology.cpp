#include <cstdio>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "trm/mesh.hpp"
#include "trm/topology.hpp"
#include "trm/vtk_io.hpp"

using namespace trm;

TEST_CASE("geometry primitives") {
    CHECK(dot(Vec2{1, 2}, Vec2{3, 4}) == doctest::Approx(11));
    CHECK(cross(Vec2{1, 0}, Vec2{0, 1}) == doctest::Approx(1));
    CHECK(norm(Vec2{3, 4}) == doctest::Approx(5));
    Vec2 p = perp(Vec2{1, 0});
    CHECK(p.x == doctest::Approx(0));
    CHECK(p.y == doctest::Approx(1));
    CHECK(tri_area(Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}) == doctest::Approx(0.5));
    // equilateral triangle has quality 1
    CHECK(tri_quality(Vec2{0, 0}, Vec2{1, 0}, Vec2{0.5, std::sqrt(3) / 2}) ==
          doctest::Approx(1.0));
    CHECK(polygon_area({{0, 0}, {2, 0}, {2, 1}, {0, 1}}) == doctest::Approx(2.0));
    Vec2 r = reflect_across(Vec2{1, 1}, Vec2{1, 0});
    CHECK(r.x == doctest::Approx(1));
    CHECK(r.y == doctest::Approx(-1));
    CHECK(point_segment_dist2(Vec2{0.5, 1}, Vec2{0, 0}, Vec2{1, 0}) == doctest::Approx(1.0));
    CHECK(point_segment_dist2(Vec2{2, 0}, Vec2{0, 0}, Vec2{1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("two-grain square: classification") {
    Mesh m = fixtures::two_grains();
    CHECK(m.count_alive_nodes() == 6);
    CHECK(m.count_alive_elems() == 4);
    CHECK(m.total_area() == doctest::Approx(1.0));
    CHECK(m.domain_area() == doctest::Approx(1.0));

    // corners 0,2,3,5: junctions with corner flag
    for (int n : {0, 2, 3, 5}) {
        CHECK(m.kind[n] == NodeKind::Junction);
        CHECK(m.corner[n]);
        CHECK(m.hull[n]);
    }
    // 1 and 4: two surfaces + hull -> junction, not corner
    for (int n : {1, 4}) {
        CHECK(m.kind[n] == NodeKind::Junction);
        CHECK(!m.corner[n]);
        CHECK(m.hull[n]);
    }
}

TEST_CASE("two-grain square: identify") {
    Mesh m = fixtures::two_grains();
    Topology topo = identify(m);

    CHECK(topo.n_grains() == 2);
    CHECK(topo.points.size() == 6);
    CHECK(topo.lines.size() == 7);

    // the single interior line runs between nodes 1 and 4
    int n_interior = 0;
    const Line* interior = nullptr;
    for (const auto& ln : topo.lines) {
        if (!ln.exterior()) {
            ++n_interior;
            interior = &ln;
        }
    }
    REQUIRE(n_interior == 1);
    REQUIRE(interior != nullptr);
    CHECK(!interior->closed);
    CHECK(interior->length == doctest::Approx(1.0));
    std::set<int> ends = {interior->nodes.front(), interior->nodes.back()};
    CHECK(ends == std::set<int>{1, 4});
    // sides are the two grains, oriented consistently with node order
    std::set<int> sides = {interior->surf_left, interior->surf_right};
    CHECK(sides == std::set<int>{0, 1});
    if (interior->nodes.front() == 1) {
        // walking up: left is the left grain
        CHECK(interior->surf_left == 0);
        CHECK(interior->surf_right == 1);
    } else {
        CHECK(interior->surf_left == 1);
        CHECK(interior->surf_right == 0);
    }

    for (const auto& s : topo.surfaces) {
        CHECK(s.area == doctest::Approx(0.5));
        CHECK(s.perimeter == doctest::Approx(1.0));  // interior boundary only
        CHECK(s.lines.size() == 4);
    }

    // hull lines have exactly one exterior side
    for (const auto& ln : topo.lines)
        if (ln.exterior())
            CHECK(((ln.surf_left == kExterior) != (ln.surf_right == kExterior)));

    ValidationReport rep = validate(m);
    CHECK(rep.ok());
    if (!rep.ok()) std::printf("%s\n", rep.str().c_str());
}

TEST_CASE("disc in square: closed line, flood, components") {
    Mesh m = fixtures::disc_in_square();
    CHECK(m.count_alive_nodes() == 17);
    CHECK(m.count_alive_elems() == 24);
    CHECK(validate(m).ok());

    // ring nodes are interface, centre is bulk, mid-wall nodes are interface
    CHECK(m.kind[0] == NodeKind::Bulk);
    for (int i = 1; i <= 8; ++i) CHECK(m.kind[i] == NodeKind::Interface);
    for (int i = 9; i <= 16; i += 2) {
        CHECK(m.kind[i] == NodeKind::Interface);
        CHECK(m.hull[i]);
    }

    Topology topo = identify(m);
    CHECK(topo.n_grains() == 2);
    CHECK(topo.points.size() == 4);  // the four corners
    CHECK(topo.lines.size() == 5);   // four walls + one closed ring

    int n_closed = 0;
    for (const auto& ln : topo.lines)
        if (ln.closed) {
            ++n_closed;
            CHECK(ln.nodes.size() == 8);
            CHECK(ln.length == doctest::Approx(8 * 2 * 0.2 * std::sin(M_PI / 8)));
            std::set<int> sides = {ln.surf_left, ln.surf_right};
            CHECK(sides == std::set<int>{0, 1});
        }
    CHECK(n_closed == 1);

    REQUIRE(topo.surface(1) != nullptr);
    const Surface& disc = *topo.surface(1);
    CHECK(disc.elems.size() == 8);
    CHECK(disc.area == doctest::Approx(8 * 0.5 * 0.2 * 0.2 * std::sin(M_PI / 4)));

    // flood from a disc element with ring edges blocked stays inside the disc
    std::set<int> ring;
    for (int i = 1; i <= 8; ++i) ring.insert(i);
    auto blocked = [&](int, int, int na, int nb) {
        return ring.count(na) && ring.count(nb);
    };
    std::vector<int> comp = flood_elements(m, disc.elems[0], blocked);
    CHECK(comp == disc.elems);

    // each surface is a single component
    CHECK(surface_components(m, 0).size() == 1);
    CHECK(surface_components(m, 1).size() == 1);
}

TEST_CASE("surface_components: detect a split grain") {
    // two triangles sharing only one node, same surface id -> two components
    std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {1, 3, 4}};
    Mesh m;
    m.domain = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    for (const auto& p : pts) m.add_node(p);
    m.add_element(0, 1, 2, 7 /* arbitrary surf id */);
    m.add_element(1, 3, 4, 7);
    auto comps = surface_components(m, 7);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<int>{0});  // lowest element id first
    CHECK(comps[1] == std::vector<int>{1});
}

TEST_CASE("edge queries") {
    Mesh m = fixtures::two_grains();
    std::array<int, 2> es;
    CHECK(m.edge_elems(1, 4, es) == 2);
    int s0, s1;
    REQUIRE(m.edge_surfs(1, 4, s0, s1));
    CHECK(std::set<int>{s0, s1} == std::set<int>{0, 1});
    CHECK(m.is_interface_edge(1, 4));
    CHECK(!m.is_interface_edge(0, 4));  // interior to grain 0

    CHECK(m.edge_elems(0, 1, es) == 1);  // hull edge
    REQUIRE(m.edge_surfs(0, 1, s0, s1));
    CHECK(std::set<int>{s0, s1} == std::set<int>{kExterior, 0});

    CHECK(m.edge_elems(0, 5, es) == 0);  // not an edge
}

TEST_CASE("wall lookup") {
    Mesh m = fixtures::two_grains();
    CHECK(m.wall_of(1, 1e-9) == 0);   // bottom edge (0,0)-(1,0)
    CHECK(m.wall_of(4, 1e-9) == 2);   // top edge (1,1)-(0,1)
    CHECK(m.wall_of(0, 1e-9) == -2);  // corner
    CHECK(m.wall_of_point({0.3, 0.7}, 1e-9) == -1);
}

TEST_CASE("relabel and remove maintain stars") {
    Mesh m = fixtures::two_grains();
    // kill grain 1's elements and drop its private node
    std::vector<int> star2 = m.star[2];
    for (int e : star2) m.remove_element(e);
    CHECK(m.star[2].empty());
    m.remove_node(2);
    CHECK(!m.node_alive[2]);
    // node 1/4/5 stars must no longer reference dead elements
    for (int n : {1, 4, 5})
        for (int e : m.star[n]) CHECK(m.elem_alive[e]);
    classify_nodes(m);
    // 5 still has one live element? no: (1,5,4) was in star2? star2 = {(1,2,5)} only.
    // (1,5,4) survives, so 5 is interface on the hull... and grain 1 is still here.
    CHECK(m.kind[5] == NodeKind::Junction);  // corner keeps junction status
}

TEST_CASE("compact renumbers densely and preserves geometry") {
    Mesh m = fixtures::two_grains();
    // retire the right grain entirely
    for (int e = 0; e < m.n_elems(); ++e)
        if (m.elem_alive[e] && m.surf[e] == 1) m.remove_element(e);
    m.remove_node(2);
    classify_nodes(m);

    double area_before = m.total_area();
    std::vector<int> surf_map;
    m.compact(surf_map);
    CHECK(m.n_nodes() == 5);
    CHECK(m.n_elems() == 2);
    CHECK(m.count_alive_nodes() == 5);
    CHECK(m.total_area() == doctest::Approx(area_before));
    REQUIRE(surf_map.size() == 2);
    CHECK(surf_map[0] == 0);
    CHECK(surf_map[1] == -1);  // gone
    CHECK(m.next_surf == 1);
    for (int e = 0; e < m.n_elems(); ++e) CHECK(m.surf[e] == 0);
}

TEST_CASE("vtk round-trip") {
    Mesh m = fixtures::disc_in_square();
    std::vector<int> surf_map;
    m.compact(surf_map);
    std::vector<double> rho = {1e6, 3.5e9};
    VtkMeta meta{0.125, 42};
    const char* path = "trm_test_roundtrip.vtk";
    write_vtk(path, m, rho, meta);

    VtkMeta meta2;
    std::vector<double> rho2;
    Mesh m2 = read_vtk(path, &meta2, &rho2);
    std::remove(path);

    CHECK(meta2.time == doctest::Approx(0.125));
    CHECK(meta2.step == 42);
    REQUIRE(m2.n_nodes() == m.n_nodes());
    REQUIRE(m2.n_elems() == m.n_elems());
    for (int n = 0; n < m.n_nodes(); ++n) {
        CHECK(m2.pos[n].x == doctest::Approx(m.pos[n].x).epsilon(1e-15));
        CHECK(m2.pos[n].y == doctest::Approx(m.pos[n].y).epsilon(1e-15));
        CHECK(m2.kind[n] == m.kind[n]);
        CHECK(m2.hull[n] == m.hull[n]);
        CHECK(m2.corner[n] == m.corner[n]);
    }
    for (int e = 0; e < m.n_elems(); ++e) {
        CHECK(m2.tri[e] == m.tri[e]);
        CHECK(m2.surf[e] == m.surf[e]);
    }
    REQUIRE(rho2.size() == rho.size());
    CHECK(rho2[0] == doctest::Approx(rho[0]).epsilon(1e-15));
    CHECK(rho2[1] == doctest::Approx(rho[1]).epsilon(1e-15));
    // reconstructed domain polygon has the same area
    CHECK(m2.domain_area() == doctest::Approx(m.domain_area()));
    CHECK(validate(m2).ok());
}

TEST_CASE("validation catches broken meshes") {
    Mesh m = fixtures::two_grains();
    SUBCASE("flipped element") {
        std::swap(m.tri[0][0], m.tri[0][1]);
        CHECK(!validate(m).ok());
    }
    SUBCASE("mislabeled classification") {
        m.kind[1] = NodeKind::Bulk;
        CHECK(!validate(m).ok());
    }
    SUBCASE("missing surface id") {
        m.surf[0] = -5;
        CHECK(!validate(m).ok());
    }
}
