#pragma once

#include "dnls/quadrature.hpp"

namespace dnls {

// Parameter triple (p, gamma, omega) of one standing wave of the focusing NLS
// with an attractive point defect of strength gamma at the origin. Admissible
// parameters satisfy p > 1, gamma > 0 and omega > gamma^2/4, which places the
// dimensionless defect parameter xi = gamma/(2 sqrt(omega)) inside (0, 1).
struct SolitonParams {
    double p = 0.0;
    double gamma = 0.0;
    double omega = 0.0;

    double xi() const;
    double alpha() const;       // (p - 1) / 2
    bool near_threshold() const; // xi within 1e-6 of 1: closed forms degrade to 0
    void validate() const;      // throws domain_error when inadmissible
};

// Scalar quantities of one profile, all evaluated from closed forms.
// `nehari` and `virial` are retained residuals, not forced to zero: the first
// tests the mutual consistency of mass, boundary_sq and lp_norm, the second
// compares grad_sq (solved from the vanishing virial functional) against an
// independent quadrature of the profile's gradient.
struct QuantityReport {
    double mass = 0.0;        // squared L2 norm
    double boundary_sq = 0.0; // squared modulus at the defect
    double lp_norm = 0.0;     // L^{p+1} norm to the power p+1
    double grad_sq = 0.0;     // squared L2 norm of the derivative
    double energy = 0.0;
    double action = 0.0;      // energy + (omega/2) mass
    double nehari = 0.0;      // residual, expected ~ 0
    double virial = 0.0;      // residual, expected ~ 0
    bool near_threshold_warning = false;
};

// Profile value at x: even in x, strictly decreasing in |x|, exponentially
// decaying. Evaluated in log space so large omega cannot overflow.
double profile_value(const SolitonParams& params, double x);

double mass_closed_form(const SolitonParams& params);
double boundary_value_sq(const SolitonParams& params);
double lp_norm_closed_form(const SolitonParams& params);

// Squared gradient norm solved from the vanishing of the virial functional:
//   grad_sq = (gamma/2) boundary_sq + (alpha/(p+1)) lp_norm.
double grad_sq_closed_form(const SolitonParams& params);

double energy_closed_form(const SolitonParams& params);

QuantityReport quantity_report(const SolitonParams& params);

// Sign of the profile energy decided through the threshold residual
//   ((p-5)/(p-1)) J(xi, 2/(p-1)) - xi (1 - xi^2)^{2/(p-1)},
// which is positive exactly when the energy is. Returns -1, 0 (within
// tolerance of the threshold) or +1. Requires p > 5.
int energy_sign(const SolitonParams& params);

} // namespace dnls
