#include "trm/oracles.hpp"

#include <cmath>

#include "trm/error.hpp"

namespace trm {

OracleCurve circle_surface_ode(double r0, double de, double dt, double t_end,
                               double stop_area) {
    if (!(r0 > 0)) throw Error("circle oracle: radius must be positive");
    if (!(dt > 0)) throw Error("circle oracle: dt must be positive");
    OracleCurve c;
    c.name = "circle_surface_ode";
    double S = M_PI * r0 * r0;
    double t = 0;
    c.t.push_back(t);
    c.value.push_back(S);
    while (S > stop_area && t < t_end) {
        S += dt * 2.0 * (-M_PI + std::sqrt(M_PI * S) * de);
        t += dt;
        if (S < 0) S = 0;
        c.t.push_back(t);
        c.value.push_back(S);
    }
    return c;
}

double circle_metastable_de(double r0) {
    if (!(r0 > 0)) throw Error("circle oracle: radius must be positive");
    return 1.0 / r0;
}

double triple_junction_surface(double t, double a, double de, bool capillarity) {
    if (!(a > 0) || !(de > 0)) throw Error("junction oracle: a and the energy jump must be positive");
    if (t < 0) throw Error("junction oracle: negative time");
    double y = a / (2.0 * std::sqrt(3.0)) - de * 2.0 * t / std::sqrt(3.0);
    if (y < -1e-12 * a)
        throw Error("junction oracle: time beyond junction-base contact");
    if (y < 0) y = 0;
    double side = std::sqrt(3.0) * a / 2.0 - y;  // apex distance
    double S = side * side * std::sqrt(3.0) / 4.0;
    if (!capillarity) S += (M_PI / 6.0 - 1.0 / std::sqrt(3.0)) * (de * t) * (de * t);
    return S;
}

} // namespace trm
