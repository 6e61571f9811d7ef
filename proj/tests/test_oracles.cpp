#include <cmath>

#include "doctest.h"
#include "trm/error.hpp"
#include "trm/oracles.hpp"

using namespace trm;

TEST_CASE("circle ode: zero energy shrinks linearly") {
    OracleCurve c = circle_surface_ode(0.3, 0.0, 1e-4, 1.0, 1e-6);
    double S0 = M_PI * 0.09;
    REQUIRE(c.t.size() == c.value.size());
    REQUIRE(c.t.size() > 100);
    for (size_t i = 0; i < c.t.size(); ++i)
        CHECK(c.value[i] == doctest::Approx(S0 - 2 * M_PI * c.t[i]).epsilon(1e-10));
    // stops at the floor, not t_end
    CHECK(c.value.back() <= 1e-6 + 2 * M_PI * 1e-4);
    CHECK(c.t.back() < 1.0);
    for (size_t i = 1; i < c.t.size(); ++i) CHECK(c.t[i] > c.t[i - 1]);
}

TEST_CASE("circle ode: metastable jumps hold the area") {
    CHECK(circle_metastable_de(0.3) == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(circle_metastable_de(0.025) == doctest::Approx(40.0).epsilon(1e-12));

    OracleCurve big = circle_surface_ode(0.3, 10.0 / 3.0, 1e-5, 0.09, 1e-9);
    for (double v : big.value) CHECK(v == doctest::Approx(M_PI * 0.09).epsilon(1e-9));

    OracleCurve small = circle_surface_ode(0.025, 40.0, 1e-6, 0.01, 1e-12);
    for (double v : small.value)
        CHECK(v == doctest::Approx(M_PI * 0.025 * 0.025).epsilon(1e-9));
}

TEST_CASE("circle ode: growth above the metastable point, decay below") {
    OracleCurve grow = circle_surface_ode(0.3, 5.0, 1e-5, 0.05, 1e-9);
    CHECK(grow.value.back() > M_PI * 0.09 * 1.5);
    OracleCurve die = circle_surface_ode(0.3, 2.0, 1e-5, 1.0, 1e-6);
    CHECK(die.value.back() <= 1e-6 + 1e-4);
    CHECK(die.t.back() < 1.0);
}

TEST_CASE("circle ode: halving dt moves the curve by less than 0.1%") {
    OracleCurve a = circle_surface_ode(0.3, 2.0, 2e-5, 0.05, 1e-9);
    OracleCurve b = circle_surface_ode(0.3, 2.0, 1e-5, 0.05, 1e-9);
    for (size_t i = 0; i < a.t.size(); ++i) {
        size_t j = 2 * i;
        if (j >= b.t.size()) break;
        REQUIRE(b.t[j] == doctest::Approx(a.t[i]).epsilon(1e-9));
        CHECK(std::abs(b.value[j] - a.value[i]) / a.value[i] < 1e-3);
    }
}

TEST_CASE("junction surface: initial value is a third of the triangle") {
    double tri = std::sqrt(3.0) / 4.0;
    CHECK(triple_junction_surface(0, 1, 2, true) == doctest::Approx(tri / 3).epsilon(1e-12));
    CHECK(triple_junction_surface(0, 1, 2, false) ==
          doctest::Approx(triple_junction_surface(0, 1, 2, true)).epsilon(1e-12));
    CHECK(triple_junction_surface(0, 2, 5, true) == doctest::Approx(4 * tri / 3).epsilon(1e-12));
}

TEST_CASE("junction surface: scalability in the product de*t") {
    for (double t : {0.01, 0.05, 0.1, 0.124}) {
        CHECK(triple_junction_surface(t, 1, 2, true) ==
              doctest::Approx(triple_junction_surface(t / 5, 1, 10, true)).epsilon(1e-12));
        CHECK(triple_junction_surface(t, 1, 2, false) ==
              doctest::Approx(triple_junction_surface(t / 5, 1, 10, false)).epsilon(1e-12));
    }
}

TEST_CASE("junction surface: vst trails the sharp solution and both grow") {
    double prev_cap = 0, prev_vst = 0;
    for (int k = 0; k <= 100; ++k) {
        double t = 0.125 * k / 100;  // contact at a/(4*de) = 0.125
        double cap = triple_junction_surface(t, 1, 2, true);
        double vst = triple_junction_surface(t, 1, 2, false);
        CHECK(vst <= cap);
        if (k > 0) {
            CHECK(cap > prev_cap);
            CHECK(vst > prev_vst);
        }
        prev_cap = cap;
        prev_vst = vst;
    }
    // at contact the growing phase holds three quarters of the triangle
    CHECK(triple_junction_surface(0.125, 1, 2, true) ==
          doctest::Approx(3 * std::sqrt(3.0) / 16).epsilon(1e-12));
}

TEST_CASE("junction surface: domain errors") {
    CHECK_THROWS_AS(triple_junction_surface(0.126, 1, 2, true), Error);
    CHECK_THROWS_AS(triple_junction_surface(-0.01, 1, 2, true), Error);
    CHECK_THROWS_AS(triple_junction_surface(0.01, 1, -2, true), Error);
    CHECK_THROWS_AS(circle_surface_ode(-0.1, 0, 1e-5, 1, 1e-6), Error);
    CHECK_THROWS_AS(circle_metastable_de(0), Error);
}
