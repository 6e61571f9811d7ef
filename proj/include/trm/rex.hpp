#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "trm/mesh.hpp"
#include "trm/remesh.hpp"

namespace trm {

// One row of the strain-rate-dependent parameter table.
struct RateRow {
    double rate;   // |eps_dot_xx|, 1/s
    double K1;     // hardening source, 1/mm^2
    double K2;     // hardening sink, dimensionless
    double Kg;     // nucleation surface rate factor, mm/s
    double delta;  // stored-energy mobility factor
};

struct MaterialParams {
    double M0 = 1.56e11;       // mobility prefactor, mm^4/(J s)
    double Q = 2.8e5;          // activation energy, J/mol
    double R = 8.314;          // gas constant, J/(mol K)
    double T = 1353.0;         // temperature, K
    double gamma = 6e-7;       // boundary energy, J/mm^2
    double tau = 1.28331e-12;  // dislocation line energy, J/mm
    double Ks = 0.0031;        // static recovery rate, 1/s
    double rho0 = 1e6;         // annealed dislocation density, 1/mm^2
    double omega = 1.5;        // nucleus over-sizing safety factor
    double b_dim = 1.0;        // dimension factor (1 in 2D)
    double conv = 0.1;         // damping of the critical-density iteration
    double delta_rest = 9.18;  // stored-energy factor while not deforming
    std::vector<RateRow> table;  // sorted by rate, ascending

    double mobility() const { return M0 * std::exp(-Q / (R * T)); }
    void check() const;  // throws ConfigError on nonsense
};

// 304L stainless at 1100 C, with the two calibrated rate rows.
MaterialParams steel_304L();

// Linear interpolation between table rows, clamped at both ends.
RateRow interp_params(const MaterialParams& mp, double rate_abs);

// Per-grain scalar state carried alongside the mesh.
struct GrainState {
    double rho = 0;     // dislocation density, 1/mm^2
    double area = 0;    // area at the previous step, mm^2
    bool rex = false;   // born by nucleation
    double birth = 0;   // s
};

// Work hardening over a strain increment; throws if the increment overshoots
// the sink term (K2*deps >= 1).
double harden(double rho, double deps, double K1, double K2);

// A grain that grew by dS swept nearly dislocation-free area; mix it in.
double homogenize_growth(double rho, double S_t, double dS, double rho0);

// Static recovery over dt, integrated exactly and floored at rho0.
double recover(double rho, double dt, double Ks, double rho0);

struct CriticalDensity {
    double rho_c = 0;
    int iters = 0;
    bool converged = false;
};

// Residual of the critical-density balance at trial value x (zero at the root).
double critical_density_residual(const MaterialParams& mp, double K1, double K2,
                                 double delta, double rate_eff, double x);

// Damped fixed-point solve for the critical density at an effective strain
// rate; delta and the hardening constants come from the interpolated row.
CriticalDensity critical_density(const MaterialParams& mp, double K1, double K2,
                                 double delta, double rate_eff);

// Running integrals defining the apparent strain rate.
struct StrainAccumulators {
    double int_rate2 = 0;  // integral of rate^2 dt
    double int_rate = 0;   // integral of rate dt
    void accumulate(double rate, double dt) {
        int_rate2 += rate * rate * dt;
        int_rate += rate * dt;
    }
    double apparent_rate() const;  // throws before any deformation
};

double nucleus_radius(double rho_c, double rho0, double gamma, double tau,
                      double omega);

// Cut a circle of radius r around an interior node out of the mesh: every
// crossed edge is split at the exact intersection, the enclosed patch becomes
// a new surface. Returns the new surface id, or -1 if the site is rejected
// (circle leaves the domain, degenerate cut, or empty enclosure); rejection
// leaves the mesh untouched.
int insert_nucleus(Mesh& m, int center, double r, double time, EventLog& events,
                   double* inserted_area = nullptr);

struct NucleationOutcome {
    int inserted = 0;
    double area = 0;       // total new surface this call
    double residual = 0;   // unused budget carried to the next step
};

// Spend the area budget on nuclei seeded at boundary nodes of grains at or
// above rho_c. Energy/state bookkeeping is done through the event log by the
// caller; grains vector is only read here to find hot grains.
NucleationOutcome nucleation_step(Mesh& m, const std::vector<GrainState>& grains,
                                  double rho_c, double r_star, double budget,
                                  std::mt19937_64& rng, double time,
                                  EventLog& events);

} // namespace trm
