#pragma once

#include <string>
#include <vector>

namespace trm {

// sampled analytic reference curve
struct OracleCurve {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;
};

// Area evolution of a circular grain whose boundary carries a stored-energy
// jump `de` against capillarity (mobility and boundary energy both 1):
//   dS/dt = 2(-pi + sqrt(pi*S)*de)
// integrated with explicit Euler at step `dt` until S <= stop_area or
// t > t_end. Every step is sampled, t=0 included.
OracleCurve circle_surface_ode(double r0, double de, double dt, double t_end,
                               double stop_area);

// Stored-energy jump that exactly balances capillarity for a circle of
// radius r0 (the stationary point of the ODE above).
double circle_metastable_de(double r0);

// Growing-phase area for three phases meeting at a junction inside an
// equilateral-triangle domain of side a: the upper phase (lower energy, jump
// `de` across both inclined boundaries, mobility 1) grows downward.
// capillarity=true gives the sharp solution, false the vanishing-surface-
// tension limit. Valid while the junction is above the base: t <= a/(4*de).
double triple_junction_surface(double t, double a, double de, bool capillarity);

} // namespace trm
