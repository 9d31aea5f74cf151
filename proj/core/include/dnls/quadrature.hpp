#pragma once

#include <functional>

namespace dnls {

// Result of a level-doubling quadrature. `error` is the difference of the last
// two refinement levels; callers treat it as an absolute error bound.
struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int levels = 0;
};

// Tanh-sinh (double exponential) quadrature of f over (0, length).
//
// The integrand receives its argument as the offset from the left endpoint,
// computed without cancellation even when it is ~1e-300, so integrable
// algebraic singularities at offset 0 are handled at full accuracy. Levels
// are doubled until two successive levels agree to `target_abs` (with a
// machine-precision floor) or `max_levels` is reached.
QuadratureResult tanh_sinh(const std::function<double(double)>& f, double length,
                           double target_abs = 1e-14, int max_levels = 12);

// J(xi, beta) = integral over s in [xi, 1] of (1 - s^2)^beta ds.
//
// Evaluated after the substitution s = sin(theta), which turns the integrand
// into cos(theta)^(2 beta + 1) on [asin(xi), pi/2]: continuous for beta >= 0
// and with an integrable endpoint singularity for beta in (-1, 0). This is
// the building block of every closed-form norm of the standing-wave profile.
//
// Throws domain_error for xi outside [0, 1] or beta <= -1 + 1e-9.
QuadratureResult incomplete_profile_integral_full(double xi, double beta);
double incomplete_profile_integral(double xi, double beta);

// Tail integral over y in [atanh(a), infinity) of (sech^2 y)^beta dy,
// computed by direct quadrature of the exponentially decaying integrand.
// It deliberately shares no code path with incomplete_profile_integral:
// the two sides exist to validate the identity
//   integral_{atanh a}^inf (sech^2 y)^beta dy = J(a, beta - 1)
// against each other. Requires 0 < a < 1 and beta > 0.
QuadratureResult sech_power_tail_integral_full(double a, double beta);
double sech_power_tail_integral(double a, double beta);

} // namespace dnls
