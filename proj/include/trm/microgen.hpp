#pragma once

#include <cstdint>
#include <vector>

#include "trm/mesh.hpp"

namespace trm {

// Recipe for an initial microstructure. Surfaces are numbered
// deterministically per preset:
//   Circle:         0 = surrounding matrix, 1 = disc
//   TripleJunction: 0 = upper (growing) phase, 1 = lower-left, 2 = lower-right
//   SixGrain:       0 = central disc, 1 = square ring, 2..5 = bottom/right/
//                   top/left outer trapezoids
//   Laguerre:       cell index = seed index
struct GeneratorSpec {
    enum class Preset { Circle, TripleJunction, SixGrain, Laguerre };
    Preset preset = Preset::Circle;
    Vec2 lo{0, 0}, hi{1, 1};  // rectangle presets; TripleJunction uses `a`
    double h = 0.01;          // target edge length
    double r0 = 0.3;          // Circle radius
    double a = 1.0;           // TripleJunction triangle side
    int n = 16;               // Laguerre cell count
    uint64_t seed = 1;        // interior jitter + Laguerre seed sampling
    std::vector<double> weights;  // optional Laguerre radii (power weights)

    void check() const;  // throws ConfigError
};

// Body-fitted triangulation of the spec: grain interfaces coincide with mesh
// edges and interface nodes lie exactly on the analytic curves.
Mesh generate(const GeneratorSpec& spec);

// The deterministic seed points the Laguerre preset tessellates around;
// cell i of the generated mesh wraps seed i.
std::vector<Vec2> laguerre_seeds(const GeneratorSpec& spec);

} // namespace trm
