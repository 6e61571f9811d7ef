#pragma once

// Parametric cubic splines over node chains, used to evaluate tangents and
// curvature along grain-boundary lines. Chord-length parametrization; natural
// end conditions for open chains, periodic closure for rings.

#include <vector>

#include "trm/geometry.hpp"

namespace trm {

// Tridiagonal solve (Thomas). a = sub, b = diag, c = super; a[0] and c[n-1]
// are ignored. Overwrites d with the solution. b is consumed.
void solve_tridiag(std::vector<double>& a, std::vector<double>& b,
                   std::vector<double>& c, std::vector<double>& d);

// Cyclic tridiagonal solve (Sherman-Morrison around Thomas). alpha is the
// top-right corner entry, beta the bottom-left. Overwrites d.
void solve_cyclic_tridiag(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& c, double alpha, double beta,
                          std::vector<double>& d);

struct CurveGeom {
    std::vector<Vec2> tangent;  // unit tangent at each input node
    std::vector<Vec2> normal;   // left unit normal (tangent rotated +90 deg)
    std::vector<double> kappa;  // signed curvature; > 0 bends toward the left normal

    // points toward the centre of curvature, magnitude |kappa|
    Vec2 curvature_vector(size_t i) const { return normal[i] * kappa[i]; }
};

// Fit a cubic spline through pts (closed: pts form a ring, first point not
// repeated) and evaluate tangent/curvature at every node. Open chains need
// >= 2 points (2 gives the straight chord), closed rings >= 3.
CurveGeom curve_geometry(const std::vector<Vec2>& pts, bool closed);

} // namespace trm
