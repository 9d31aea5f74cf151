#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "dnls/soliton.hpp"

namespace dnls {

// Uniform symmetric grid on [-L, L] with an odd node count, so the defect at
// x = 0 falls exactly on the center node.
struct Grid {
    double half_width = 0.0;
    int node_count = 0;

    double step() const { return 2.0 * half_width / (node_count - 1); }
    int center() const { return (node_count - 1) / 2; }
    // Anchored at the center so x = 0 is exact and nodes come in +/- pairs.
    double node(int j) const { return (j - center()) * step(); }
    void validate() const; // throws domain_error
    bool operator==(const Grid&) const = default;
};

// Complex-valued samples on a grid. Values are treated as zero outside
// [-L, L]; valid use keeps the boundary samples negligible.
struct GridFunction {
    Grid grid;
    std::vector<std::complex<double>> values;

    void validate() const;
};

// Build a grid function by sampling a real profile.
GridFunction sample_profile(const Grid& grid, const SolitonParams& params);

// The discrete functionals of one grid function at parameters (p, gamma,
// omega): trapezoid mass (the quantity the time integrator conserves
// exactly), forward-difference gradient, center-node boundary value, and the
// L^{p+1} term by composite Simpson on each half-line so the derivative kink
// at the defect node costs no accuracy. Energy, action, Nehari and virial
// functionals are composites of these.
struct FunctionalValues {
    double mass = 0.0;
    double grad_sq = 0.0;
    double boundary_sq = 0.0;
    double lp = 0.0;
    double energy = 0.0;
    double action_omega = 0.0;
    double nehari_omega = 0.0;
    double virial_P = 0.0;
};

FunctionalValues functionals(const GridFunction& v, double p, double gamma, double omega);

// Same computation on raw sample storage; used by the time integrator's
// monitoring loop.
FunctionalValues functionals(const Grid& grid, const std::vector<std::complex<double>>& values,
                             double p, double gamma, double omega);

// Mass-preserving scaling v^lambda(x) = sqrt(lambda) v(lambda x), resampled
// onto the same grid by cubic interpolation; points that map outside the
// window read as zero. For lambda < 1 the continuum function spreads beyond
// the window; `mass_outside_rel` reports the lost fraction and the warning
// flag trips above 1e-8.
struct ScaledFunction {
    GridFunction fn;
    double mass_outside_rel = 0.0;
    bool mass_leak_warning = false;
};

ScaledFunction scale(const GridFunction& v, double lambda);

// The landscape of lambda -> E(v^lambda) = a l^2 - b l - c l^alpha for a
// function with positive energy: local minimum lambda1, zeros lambda2 and
// lambda4, local maximum lambda3, strictly ordered.
struct LambdaLandscape {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;
    double a = 0.0; // grad_sq / 2
    double b = 0.0; // gamma boundary_sq / 2
    double c = 0.0; // lp / (p+1)

    double energy_at(double lambda) const;
    double energy_slope_at(double lambda) const; // d/dlambda E(v^lambda)
    double alpha = 0.0;
};

// Requires E(v) > 0, gamma > 0 (b > 0) and alpha > 2; otherwise throws
// numeric_error with a no-landscape message.
LambdaLandscape lambda_landscape(const GridFunction& v, double p, double gamma);

// Margins used to decide the strict inequalities of the blowup set on a
// computer: P and K must be below -margin, the energy window is shrunk by
// margin on both sides, and the mass match is relative.
// The mass default absorbs the h^2 sampling error of profiles on the
// production grids; the margin default only guards floating-point noise.
struct MembershipTolerances {
    double mass_rel = 1e-4;
    double margin = 1e-10;
};

struct MembershipReport {
    bool energy_window = false;   // margin < E(v) < E(phi) - margin
    bool mass_match = false;      // |mass(v) - mass(phi)| <= mass_rel * mass(phi)
    bool virial_negative = false; // P(v) < -margin
    bool nehari_negative = false; // K(v) < -margin
    bool member = false;          // conjunction of the four

    double energy = 0.0;
    double energy_phi = 0.0;
    double mass = 0.0;
    double mass_phi = 0.0;
    double virial_P = 0.0;
    double nehari_K = 0.0;
};

// Membership in the invariant blowup set attached to the standing wave at
// `params`. The set is only defined when the wave has positive energy;
// otherwise throws numeric_error("undefined_set: ...").
MembershipReport membership_B(const GridFunction& v, const SolitonParams& params,
                              const MembershipTolerances& tol = {});

// E(v) - P(v) - E(phi), which is nonnegative for members of the blowup set.
// Throws if v is not a member under the given tolerances.
double ep_gap(const GridFunction& v, const SolitonParams& params,
              const MembershipTolerances& tol = {});

// The unique mu > 0 with vanishing Nehari functional for mu * v, when the
// rescaling exists (positive quadratic and L^{p+1} terms).
double nehari_scale(const GridFunction& v, double p, double gamma, double omega);

// Plain-text serialization: header x,re,im, one row per node, 15 significant
// digits. The reader validates uniform spacing, odd node count and the exact
// center node.
void write_grid_csv(std::ostream& out, const GridFunction& v);
GridFunction read_grid_csv(std::istream& in);

} // namespace dnls
