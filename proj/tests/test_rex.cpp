#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "trm/error.hpp"
#include "trm/remesh.hpp"
#include "trm/rex.hpp"
#include "trm/topology.hpp"

using namespace trm;

namespace {

double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

// independent root finder on the same residual, for cross-checking the
// damped fixed-point iteration
double bisect_critical(const MaterialParams& mp, double K1, double K2,
                       double delta, double rate) {
    double sat = K1 / K2;
    double lo = 1e-12 * sat, hi = 0.999 * sat;
    REQUIRE(critical_density_residual(mp, K1, K2, delta, rate, lo) < 0);
    REQUIRE(critical_density_residual(mp, K1, K2, delta, rate, hi) > 0);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (critical_density_residual(mp, K1, K2, delta, rate, mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("material presets and parameter interpolation") {
    MaterialParams mp = steel_304L();
    mp.check();
    CHECK(mp.mobility() == doctest::Approx(2.416).epsilon(2e-3));

    RateRow lo = interp_params(mp, 0.01);
    CHECK(lo.K1 == doctest::Approx(1.105e9));
    CHECK(lo.K2 == doctest::Approx(9.0));
    CHECK(lo.Kg == doctest::Approx(1.3e-4));
    CHECK(lo.delta == doctest::Approx(0.937));

    RateRow clamped = interp_params(mp, 0.5);  // above the table: last row
    CHECK(clamped.K1 == doctest::Approx(1.55e9));
    CHECK(clamped.K2 == doctest::Approx(6.9));
    CHECK(clamped.Kg == doctest::Approx(9e-4));
    CHECK(clamped.delta == doctest::Approx(2.245));

    RateRow below = interp_params(mp, 1e-4);  // below the table: first row
    CHECK(below.K1 == doctest::Approx(1.105e9));

    RateRow mid = interp_params(mp, 0.055);  // halfway between the rows
    CHECK(mid.K1 == doctest::Approx(1.3275e9));
    CHECK(mid.K2 == doctest::Approx(7.95));
    CHECK(mid.Kg == doctest::Approx(5.15e-4));
    CHECK(mid.delta == doctest::Approx(1.591));

    MaterialParams bad = mp;
    bad.table.push_back({0.05, 1e9, 8, 2e-4, 1.0});  // unsorted key
    CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("hardening: fixed point, explicit value, and step guard") {
    CHECK(harden(3e8, 0.0, 1.105e9, 9.0) == 3e8);
    double sat = 1.105e9 / 9.0;
    CHECK(harden(sat, 0.013, 1.105e9, 9.0) == doctest::Approx(sat));
    CHECK(harden(1e8, 0.01, 1.105e9, 9.0) == doctest::Approx(1.0205e8));
    CHECK_THROWS_AS(harden(1e8, 0.2, 1.105e9, 9.0), Error);  // K2*deps >= 1

    // long deformation drives rho to the saturation density
    double rho = 1e6;
    for (int i = 0; i < 10000; ++i) rho = harden(rho, 1e-3, 1.105e9, 9.0);
    CHECK(std::abs(rho - sat) / sat <= 1e-6);
}

TEST_CASE("growth homogenization dilutes toward the annealed density") {
    CHECK(homogenize_growth(5e8, 1e-3, 0.0, 1e6) == 5e8);
    CHECK(homogenize_growth(2e6, 1e-3, 1e-3, 1e6) == doctest::Approx(1.5e6));
    CHECK(homogenize_growth(5e8, 1e-3, -1e-4, 1e6) == 5e8);  // shrinking: skip
    // bounded between rho0 and the old value
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        double r = urand(rng, 1e6, 1e9), s = urand(rng, 1e-6, 1e-2);
        double ds = urand(rng, 0, 1e-2);
        double rn = homogenize_growth(r, s, ds, 1e6);
        CHECK(rn <= r * (1 + 1e-12));
        CHECK(rn >= 1e6 * (1 - 1e-12));
    }
}

TEST_CASE("static recovery: exact exponential with a floor") {
    CHECK(recover(1e9, 0.0, 0.0031, 1e6) == 1e9);
    CHECK(recover(1e9, 10.0, 0.0031, 1e6) == doctest::Approx(9.6948e8).epsilon(1e-4));
    CHECK(recover(1e6, 1e6, 0.0031, 1e6) == 1e6);
    CHECK(recover(1.0001e6, 1e5, 0.0031, 1e6) == 1e6);  // floored
}

TEST_CASE("critical density: analytic fixed point") {
    // constants tuned so the balance reads x = sqrt(A / -ln(1 - x/2)) with
    // A chosen to put the root at 2(1 - 1/e)
    double want = 2.0 * (1.0 - std::exp(-1.0));
    MaterialParams mp;
    mp.M0 = 1.0;
    mp.Q = 1e-12;
    mp.gamma = want * want;
    mp.tau = 1.0;
    CriticalDensity cd = critical_density(mp, 2.0, 1.0, 1.0, 1.0);
    CHECK(cd.converged);
    CHECK(cd.rho_c == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("critical density: matches bisection on randomized parameters") {
    std::mt19937_64 rng(20260814);
    int done = 0;
    while (done < 20) {
        MaterialParams mp = steel_304L();
        double K1 = urand(rng, 1e8, 1e10);
        double K2 = urand(rng, 1.0, 20.0);
        double delta = urand(rng, 0.5, 5.0);
        double rate = urand(rng, 1e-3, 1.0);
        double sat = K1 / K2;
        // keep the root comfortably interior so both solvers are in their
        // well-conditioned regime
        if (!(critical_density_residual(mp, K1, K2, delta, rate, 0.95 * sat) > 0))
            continue;
        double ref = bisect_critical(mp, K1, K2, delta, rate);
        CriticalDensity cd = critical_density(mp, K1, K2, delta, rate);
        CHECK(cd.converged);
        CHECK(std::abs(cd.rho_c - ref) / ref <= 1e-5);
        ++done;
    }

    // physical 304L point: finite and below saturation
    MaterialParams mp = steel_304L();
    RateRow row = interp_params(mp, 0.01);
    CriticalDensity cd = critical_density(mp, row.K1, row.K2, row.delta, 0.01);
    CHECK(cd.converged);
    CHECK(cd.rho_c > 0);
    CHECK(cd.rho_c < row.K1 / row.K2);

    // a faster rate moves the threshold up
    CriticalDensity cd2 = critical_density(mp, row.K1, row.K2, row.delta, 0.02);
    CHECK(cd2.rho_c > cd.rho_c);
}

TEST_CASE("apparent strain rate accumulators") {
    StrainAccumulators acc;
    CHECK_THROWS_AS(acc.apparent_rate(), Error);
    acc.accumulate(0.1, 10.0);
    CHECK(acc.apparent_rate() == doctest::Approx(0.1));
    acc.accumulate(0.0, 10.0);  // rest adds nothing
    CHECK(acc.apparent_rate() == doctest::Approx(0.1));
    acc.accumulate(0.01, 100.0);
    CHECK(acc.apparent_rate() == doctest::Approx(0.055));
}

TEST_CASE("nucleus radius") {
    CHECK(nucleus_radius(1e9 + 1e6, 1e6, 6e-7, 1.28331e-12, 1.5) ==
          doctest::Approx(7.013e-4).epsilon(1e-3));
    CHECK_THROWS_AS(nucleus_radius(1e6, 1e6, 6e-7, 1.28331e-12, 1.5), Error);
    CHECK(steel_304L().omega == 1.5);
}

TEST_CASE("rho stays within its admissible band under any update sequence") {
    std::mt19937_64 rng(99);
    double K1 = 1.105e9, K2 = 9.0, rho0 = 1e6;
    double sat = K1 / K2;
    double rho = rho0, S = 1e-3;
    for (int i = 0; i < 5000; ++i) {
        switch (rng() % 3) {
            case 0: rho = harden(rho, urand(rng, 0, 0.05), K1, K2); break;
            case 1: rho = homogenize_growth(rho, S, urand(rng, 0, S), rho0); break;
            default: rho = recover(rho, urand(rng, 0, 5.0), 0.0031, rho0); break;
        }
        REQUIRE(rho >= rho0 * (1 - 1e-12));
        REQUIRE(rho <= sat * (1 + 1e-9));
    }
}

TEST_CASE("nucleus insertion: interior site cuts a closed ring") {
    Mesh m = fixtures::disc_in_square(0.2);
    double dom = m.domain_area();
    int elems_before = m.count_alive_elems();
    EventLog log;
    double area = 0;
    int ns = insert_nucleus(m, 0, 0.1, 2.0, log, &area);
    REQUIRE(ns >= 0);
    CHECK(area > 0);
    CHECK(area <= M_PI * 0.01 * (1 + 1e-12));
    CHECK(m.count_alive_elems() > elems_before);
    CHECK(m.total_area() == doctest::Approx(dom));
    REQUIRE(validate(m).ok());
    REQUIRE(log.size() == 1);
    CHECK(log[0].kind == Event::Kind::Nucleate);
    CHECK(log[0].a == ns);
    CHECK(log[0].b == 0);
    CHECK(m.kind[0] == NodeKind::Bulk);  // centre is interior to the nucleus

    Topology t = identify(m);
    CHECK(t.n_grains() == 3);
    const Surface* nuc = t.surface(ns);
    REQUIRE(nuc != nullptr);
    REQUIRE(nuc->lines.size() == 1);
    const Line& ring = t.lines[nuc->lines[0]];
    CHECK(ring.closed);
    Vec2 c = m.pos[0];
    for (int n : ring.nodes) CHECK(dist(m.pos[n], c) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("nucleus insertion: boundary site splits the line at two new junctions") {
    Mesh m = fixtures::two_grains();
    int center;
    REQUIRE(split_edge_at(m, 1, 4, {0.5, 0.5}, center));
    REQUIRE(m.kind[center] == NodeKind::Interface);
    EventLog log;
    int ns = insert_nucleus(m, center, 0.2, 0.0, log);
    REQUIRE(ns >= 0);
    REQUIRE(validate(m).ok());
    CHECK(m.total_area() == doctest::Approx(1.0));

    Topology t = identify(m);
    CHECK(t.n_grains() == 3);
    CHECK(t.points.size() == 8);  // 4 corners, 2 wall junctions, 2 fresh cuts
    int fresh = 0;
    for (const auto& pt : t.points) {
        if (m.corner[pt.node] || m.hull[pt.node]) continue;
        ++fresh;
        CHECK(dist(m.pos[pt.node], Vec2{0.5, 0.5}) == doctest::Approx(0.2).epsilon(1e-9));
        CHECK(pt.lines.size() == 3);
    }
    CHECK(fresh == 2);
    CHECK(t.lines.size() == 10);
}

TEST_CASE("nucleus insertion: junction site detaches the centre") {
    Mesh m = fixtures::three_sector_hex(1.0);
    REQUIRE(m.kind[0] == NodeKind::Junction);
    double dom = m.total_area();
    EventLog log;
    int ns = insert_nucleus(m, 0, 0.4, 0.0, log);
    REQUIRE(ns >= 0);
    REQUIRE(validate(m).ok());
    CHECK(m.kind[0] == NodeKind::Bulk);  // demoted: all its element are the nucleus
    CHECK(m.total_area() == doctest::Approx(dom));

    Topology t = identify(m);
    CHECK(t.n_grains() == 4);
    int circle_junctions = 0;
    for (const auto& pt : t.points) {
        if (m.corner[pt.node]) continue;
        ++circle_junctions;
        CHECK(dist(m.pos[pt.node], Vec2{0, 0}) == doctest::Approx(0.4).epsilon(1e-9));
    }
    CHECK(circle_junctions == 3);
    CHECK(t.lines.size() == 12);  // 6 hull, 3 outer ray stubs, 3 arcs
}

TEST_CASE("nucleus insertion: rejections leave the mesh alone") {
    Mesh m = fixtures::disc_in_square(0.2);
    Mesh copy = m;
    EventLog log;
    // circle would poke through the wall
    CHECK(insert_nucleus(m, 0, 0.6, 0.0, log) == -1);
    // hull and corner sites are not allowed
    int wall_node = -1, corner_node = -1;
    for (int n = 0; n < m.n_nodes(); ++n) {
        if (m.corner[n]) corner_node = n;
        else if (m.hull[n]) wall_node = n;
    }
    CHECK(insert_nucleus(m, wall_node, 0.05, 0.0, log) == -1);
    CHECK(insert_nucleus(m, corner_node, 0.05, 0.0, log) == -1);
    CHECK(insert_nucleus(m, 0, 0.0, 0.0, log) == -1);
    CHECK(log.empty());
    CHECK(m.n_nodes() == copy.n_nodes());
    CHECK(m.count_alive_elems() == copy.count_alive_elems());
    for (int n = 0; n < m.n_nodes(); ++n) CHECK(m.pos[n] == copy.pos[n]);
}

TEST_CASE("nucleation step: budget, placement, and determinism") {
    auto run = [](uint64_t seed, Mesh& m, EventLog& log, double budget, double r) {
        std::vector<GrainState> grains(m.next_surf);
        grains[0].rho = 6e8;  // outer grain hot
        grains[1].rho = 1e6;  // disc cold
        std::mt19937_64 rng(seed);
        return nucleation_step(m, grains, 5e8, r, budget, rng, 1.0, log);
    };

    Mesh m = fixtures::ring_in_polygon(24, 0.3, 1.0);
    double dom = m.total_area();
    double r = 0.12, a_nom = M_PI * r * r;
    EventLog log;
    NucleationOutcome out = run(7, m, log, 2.2 * a_nom, r);
    CHECK(out.inserted >= 1);
    CHECK(out.inserted == count_if(log.begin(), log.end(), [](const Event& e) {
              return e.kind == Event::Kind::Nucleate;
          }));
    CHECK(out.residual >= 0);
    CHECK(out.area + out.residual == doctest::Approx(2.2 * a_nom));
    CHECK(out.residual < a_nom);  // spent while affordable
    REQUIRE(validate(m).ok());
    CHECK(m.total_area() == doctest::Approx(dom));
    CHECK(identify(m).n_grains() == 2 + out.inserted);

    // nuclei seeded on the hot grain's boundary, apart from each other
    std::vector<Vec2> centers;
    for (const auto& e : log) centers.push_back(m.pos[e.b]);
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            CHECK(dist(centers[i], centers[j]) >= 2.1 * r - 1e-12);

    // same seed, same story
    Mesh m2 = fixtures::ring_in_polygon(24, 0.3, 1.0);
    EventLog log2;
    NucleationOutcome out2 = run(7, m2, log2, 2.2 * a_nom, r);
    CHECK(out2.inserted == out.inserted);
    CHECK(out2.area == out.area);
    REQUIRE(log2.size() == log.size());
    for (size_t i = 0; i < log.size(); ++i) {
        CHECK(log2[i].a == log[i].a);
        CHECK(log2[i].b == log[i].b);
    }

    // different seed is allowed to differ, budget too small does nothing
    Mesh m3 = fixtures::ring_in_polygon(24, 0.3, 1.0);
    EventLog log3;
    NucleationOutcome out3 = run(7, m3, log3, 0.5 * a_nom, r);
    CHECK(out3.inserted == 0);
    CHECK(out3.residual == 0.5 * a_nom);

    // nothing hot, nothing happens
    Mesh m4 = fixtures::ring_in_polygon(24, 0.3, 1.0);
    std::vector<GrainState> cold(m4.next_surf);
    cold[0].rho = cold[1].rho = 1e6;
    std::mt19937_64 rng(3);
    EventLog log4;
    NucleationOutcome out4 =
        nucleation_step(m4, cold, 5e8, r, 3 * a_nom, rng, 0.0, log4);
    CHECK(out4.inserted == 0);
    CHECK(out4.residual == 3 * a_nom);
}
