#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "trm/error.hpp"
#include "trm/microgen.hpp"
#include "trm/topology.hpp"

using namespace trm;

namespace {

bool same_mesh(const Mesh& a, const Mesh& b) {
    if (a.pos.size() != b.pos.size() || a.tri.size() != b.tri.size()) return false;
    for (size_t i = 0; i < a.pos.size(); ++i)
        if (!(a.pos[i] == b.pos[i])) return false;
    for (size_t e = 0; e < a.tri.size(); ++e)
        if (a.tri[e] != b.tri[e] || a.surf[e] != b.surf[e]) return false;
    return true;
}

double surf_area(const Mesh& m, int s) {
    double A = 0;
    for (int e = 0; e < m.n_elems(); ++e)
        if (m.elem_alive[e] && m.surf[e] == s) A += m.area(e);
    return A;
}

} // namespace

TEST_CASE("disc preset: body-fitted two-grain layout") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::Circle;
    spec.r0 = 0.3;
    spec.h = 0.02;
    Mesh m = generate(spec);
    CHECK(validate(m).ok());

    Topology t = identify(m);
    REQUIRE(t.n_grains() == 2);

    // the disc boundary is one closed line whose nodes sit exactly on the circle
    int ring_lines = 0;
    Vec2 c{0.5, 0.5};
    for (const Line& l : t.lines) {
        if (l.surf_left == -1 || l.surf_right == -1) continue;
        ++ring_lines;
        CHECK(l.closed);
        for (int nd : l.nodes) CHECK(std::abs(dist(m.pos[nd], c) - 0.3) <= 1e-6 * spec.h);
    }
    CHECK(ring_lines == 1);

    // disc area equals the inscribed polygon of the sampled circle
    double disc = surf_area(m, 1);
    CHECK(disc == doctest::Approx(M_PI * 0.09).epsilon(2e-3));
    CHECK(disc < M_PI * 0.09);  // inscribed polygon is strictly smaller
    CHECK(surf_area(m, 0) + disc == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(same_mesh(m, generate(spec)));
}

TEST_CASE("disc preset: fine mesh keeps nodes on the circle") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::Circle;
    spec.r0 = 0.3;
    spec.h = 0.006;
    Mesh m = generate(spec);
    Topology t = identify(m);
    REQUIRE(t.n_grains() == 2);
    Vec2 c{0.5, 0.5};
    for (const Line& l : t.lines) {
        if (l.surf_left == -1 || l.surf_right == -1) continue;
        for (int nd : l.nodes) CHECK(std::abs(dist(m.pos[nd], c) - 0.3) <= 1e-6 * spec.h);
    }
    CHECK(surf_area(m, 1) == doctest::Approx(M_PI * 0.09).epsilon(2e-4));
}

TEST_CASE("triple junction preset: three equal phases around the incentre") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::TripleJunction;
    spec.a = 1.0;
    spec.h = 0.02;
    Mesh m = generate(spec);
    CHECK(validate(m).ok());

    Topology t = identify(m);
    CHECK(t.n_grains() == 3);
    CHECK(t.points.size() == 7);  // 3 corners + 3 side midpoints + junction
    CHECK(t.lines.size() == 9);   // 6 wall halves + 3 interior boundaries

    // interior junction at the incentre
    Vec2 J{0.5, 1.0 / (2.0 * std::sqrt(3.0))};
    bool found = false;
    for (const Point& p : t.points)
        if (dist(m.pos[p.node], J) < 1e-9) {
            found = true;
            CHECK(p.lines.size() == 3);
        }
    CHECK(found);

    // straight boundaries make each phase exactly a third of the triangle
    double tri = std::sqrt(3.0) / 4.0;
    for (int s = 0; s < 3; ++s)
        CHECK(surf_area(m, s) == doctest::Approx(tri / 3.0).epsilon(1e-9));

    // interface nodes lie on the three analytic segments
    Vec2 mb{0.5, 0.0}, mr{0.75, std::sqrt(3.0) / 4.0}, ml{0.25, std::sqrt(3.0) / 4.0};
    auto on_seg = [&](const Vec2& p, const Vec2& a, const Vec2& b) {
        Vec2 d = b - a;
        double tt = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
        return dist(p, a + d * tt);
    };
    for (const Line& l : t.lines) {
        if (l.surf_left == -1 || l.surf_right == -1) continue;
        for (int nd : l.nodes) {
            double d = std::min({on_seg(m.pos[nd], J, mb), on_seg(m.pos[nd], J, mr),
                                 on_seg(m.pos[nd], J, ml)});
            CHECK(d <= 1e-6 * spec.h);
        }
    }
}

TEST_CASE("six grain preset: disc in ring in four trapezoids") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::SixGrain;
    spec.h = 0.02;
    Mesh m = generate(spec);
    CHECK(validate(m).ok());
    Topology t = identify(m);
    REQUIRE(t.n_grains() == 6);

    double disc = surf_area(m, 0);
    CHECK(disc == doctest::Approx(M_PI * 0.18 * 0.18).epsilon(3e-3));
    CHECK(surf_area(m, 1) == doctest::Approx(0.55 * 0.55 - disc).epsilon(1e-9));
    double trap = (1.0 - 0.55 * 0.55) / 4.0;
    for (int s = 2; s < 6; ++s)
        CHECK(surf_area(m, s) == doctest::Approx(trap).epsilon(1e-9));

    double total = 0;
    for (int s = 0; s < 6; ++s) total += surf_area(m, s);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(same_mesh(m, generate(spec)));
}

TEST_CASE("laguerre preset: deterministic power diagram") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::Laguerre;
    spec.n = 12;
    spec.seed = 7;
    spec.h = 0.03;
    Mesh m = generate(spec);
    CHECK(validate(m).ok());
    Topology t = identify(m);
    CHECK(t.n_grains() == 12);

    double total = 0;
    for (int s = 0; s < 12; ++s) total += surf_area(m, s);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // every element centroid is power-nearest to its own seed
    std::vector<Vec2> seeds = laguerre_seeds(spec);
    REQUIRE(seeds.size() == 12);
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        Vec2 c = m.centroid(e);
        int best = 0;
        double bd = 1e300;
        for (int i = 0; i < 12; ++i) {
            double d = norm2(c - seeds[i]);
            if (d < bd) { bd = d; best = i; }
        }
        CHECK(best == m.surf[e]);
    }

    CHECK(same_mesh(m, generate(spec)));
    GeneratorSpec other = spec;
    other.seed = 8;
    CHECK(!same_mesh(m, generate(other)));
}

TEST_CASE("laguerre preset: radius weights shift the bisectors") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::Laguerre;
    spec.n = 4;
    spec.seed = 3;
    spec.h = 0.04;
    spec.weights = {0.30, 0.05, 0.05, 0.05};
    Mesh m = generate(spec);
    CHECK(validate(m).ok());
    CHECK(identify(m).n_grains() == 4);

    std::vector<Vec2> seeds = laguerre_seeds(spec);
    for (int e = 0; e < m.n_elems(); ++e) {
        if (!m.elem_alive[e]) continue;
        Vec2 c = m.centroid(e);
        int best = 0;
        double bd = 1e300;
        for (int i = 0; i < 4; ++i) {
            double d = norm2(c - seeds[i]) - spec.weights[i] * spec.weights[i];
            if (d < bd) { bd = d; best = i; }
        }
        CHECK(best == m.surf[e]);
    }

    // the heavy seed's cell outgrows the plain voronoi cell
    GeneratorSpec plain = spec;
    plain.weights.clear();
    Mesh mp = generate(plain);
    CHECK(surf_area(m, 0) > surf_area(mp, 0));
}

TEST_CASE("generator rejects infeasible recipes") {
    GeneratorSpec spec;
    spec.preset = GeneratorSpec::Preset::Circle;
    spec.r0 = 0.6;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec.r0 = 0.3;
    spec.h = -1;
    CHECK_THROWS_AS(generate(spec), ConfigError);

    GeneratorSpec tj;
    tj.preset = GeneratorSpec::Preset::TripleJunction;
    tj.h = 0.3;
    CHECK_THROWS_AS(generate(tj), ConfigError);

    GeneratorSpec six;
    six.preset = GeneratorSpec::Preset::SixGrain;
    six.h = 0.2;
    CHECK_THROWS_AS(generate(six), ConfigError);

    GeneratorSpec lag;
    lag.preset = GeneratorSpec::Preset::Laguerre;
    lag.n = 0;
    CHECK_THROWS_AS(generate(lag), ConfigError);
    lag.n = 3;
    lag.weights = {0.1, -0.2, 0.1};
    CHECK_THROWS_AS(generate(lag), ConfigError);
    lag.weights = {0.1, 0.2};
    CHECK_THROWS_AS(generate(lag), ConfigError);
}
