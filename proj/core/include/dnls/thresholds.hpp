#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnls/soliton.hpp"

namespace dnls {

// The three scalar threshold equations in xi, each with a unique root in
// (0, 1) for p > 5. With J(xi, b) the incomplete profile integral and
// e = 2/(p-1), the residuals are
//   Xi0: ((p-5)/(p-1)) J(xi, e-1) - xi (1-xi^2)^(e-1)   [mass-derivative sign]
//   Xi1: ((p-5)/(p-1)) J(xi, e)   - xi (1-xi^2)^e       [energy sign]
//   Xi2: ((p-5)/2)     J(xi, e)   - xi (1-xi^2)^e       [lambda-slope sign]
enum class ThresholdKind { Xi0, Xi1, Xi2 };

const char* threshold_name(ThresholdKind kind);

// Residual of the threshold equation at xi; positive on the small-xi side.
double threshold_residual(ThresholdKind kind, double p, double xi);

// Root of the threshold residual, bracketed in (1e-10, 1 - 1e-10), bisected
// to width 1e-13 and polished by secant steps. Verifies a sign change across
// the bracket first and that |residual| <= 1e-12 * term scale at the root.
// Requires p > 5 (the equations degenerate at p = 5).
double threshold_xi(ThresholdKind kind, double p);

// Frequency threshold gamma^2 / (4 xi*^2) for the given equation.
double omega_threshold(ThresholdKind kind, double p, double gamma);

// Number of sign changes of the residual on a dense uniform xi-grid,
// computed from a cumulative panel integral so a million-point scan is
// cheap. The root is asserted unique by the theory; a count other than 1
// must be surfaced, never silently resolved.
int threshold_sign_changes(ThresholdKind kind, double p, int samples);

enum class StabilityLabel {
    stable,
    orbitally_unstable,
    orbitally_unstable_conjectured_strong,
    strongly_unstable,
};

const char* stability_label_name(StabilityLabel label);

// Where one parameter triple sits relative to the three frequency thresholds
// omega_0 > omega_2 > omega_1 is reversed in xi: xi_1 < xi_2 < xi_0.
// For p <= 5 the thresholds do not exist and every admissible wave is stable;
// the threshold fields are then NaN and the flags false.
struct RegimeClassification {
    double xi = 0.0;
    bool supercritical = false; // p > 5
    double xi0 = 0.0, xi1 = 0.0, xi2 = 0.0;
    double omega0 = 0.0, omega1 = 0.0, omega2 = 0.0;
    bool mass_derivative_negative = false; // xi < xi0, i.e. omega > omega0
    bool energy_positive = false;          // xi < xi1, i.e. omega > omega1
    bool slope_condition = false;          // xi < xi2, i.e. omega > omega2
    StabilityLabel label = StabilityLabel::stable;
};

RegimeClassification classify(const SolitonParams& params);

// One row of a threshold sweep; `error` is empty on success.
struct SweepRow {
    double p = 0.0;
    double xi0 = 0.0, xi1 = 0.0, xi2 = 0.0;
    std::string error;
};

// Uniform grid of n >= 2 values of p in [lo, hi], lo > 5. Row failures are
// recorded in the row and the sweep continues.
std::vector<SweepRow> sweep(double lo, double hi, int n);

// CSV with header p,xi0,xi1,xi2 at 15 significant digits; failed rows emit nan.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace dnls
