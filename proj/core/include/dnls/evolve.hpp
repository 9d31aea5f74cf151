#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnls/grid.hpp"

namespace dnls {

// Configuration of one simulation. p, gamma come from `params`; omega is only
// used to scale the monitored Nehari functional and the blowup-set checks.
// gamma may be zero or negative here: the integrator itself has no attractive-
// defect restriction, only the standing-wave bookkeeping does.
struct SimConfig {
    Grid grid;
    double dt = 1e-3;
    double t_end = 1.0;
    SolitonParams params;

    double blowup_gradient_factor = 10.0;
    double blowup_peak_factor = 8.0;
    double conservation_abort_rel = 1e-4;
    double linear_solver_tol = 1e-12;
    int record_stride = 10;
    double nonlinear_coupling = 1.0; // 0 turns the nonlinearity off
    MembershipTolerances membership_tol{};

    void validate() const;
};

enum class Outcome { completed, blowup_detected, conservation_violation };
const char* outcome_name(Outcome outcome);

struct TraceRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double grad_sq = 0.0;
    double peak_sq = 0.0;     // max_j |u_j|^2
    double boundary_sq = 0.0; // |u(0)|^2
    double virial = 0.0;      // V = ||x u||^2 truncated to the window
    double P = 0.0;
    double K = 0.0;
    bool in_B = false;
};

struct Trace {
    std::vector<TraceRecord> records;
    Outcome outcome = Outcome::completed;
    double t_star = 0.0; // time of early stop; NaN for completed runs
    std::string reason;
    double max_solver_residual = 0.0;
};

// One Strang-split step: exact pointwise half-step of the nonlinear phase
// rotation, a full Crank-Nicolson step of the linear part (second difference
// plus -gamma/h on the center diagonal, Dirichlet zero at the window edges),
// then the second nonlinear half-step. Both substeps conserve the discrete
// mass, the linear one up to the tridiagonal solve tolerance.
GridFunction step(const GridFunction& u, const SimConfig& config);

// Steps until t_end, or until blowup is declared (gradient and peak growth
// factors reached with the mass still intact), or until a conservation
// violation aborts the run. Records every `record_stride` steps.
Trace run(const GridFunction& u0, const SimConfig& config);

// Max over interior record times of
//   |second difference of V / tau^2 - 8 P| / max(1, |8 P|)
// on the uniformly spaced prefix of the records. Needs >= 3 such records.
double virial_residual(const Trace& trace);

struct BlowupReport {
    double lambda = 0.0;
    bool b_defined = false; // standing wave energy positive, so the set exists
    MembershipReport membership;
    Trace trace;
    // P < 0 at every retained record until detection (the snapshot at the
    // detection step itself is the unresolved burst and is excluded).
    bool p_negative_throughout = false;
};

// Scales the sampled standing wave by lambda, reports blowup-set membership
// of the initial data, runs, and checks the sign history of P. Requires
// p > 5. When the wave's energy is not positive the set is undefined:
// b_defined is false, membership is vacuously false, and the run still
// executes (the regime between the instability thresholds is exposed as an
// experiment with no pass/fail claim).
BlowupReport blowup_experiment(const SolitonParams& params, double lambda,
                               SimConfig config);

// CSV with header t,mass,energy,grad_sq,peak_sq,boundary_sq,virial,P,K,in_B
// at 15 significant digits, then one final line holding the outcome as a
// JSON object {outcome, t_star, reason}.
void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in);

// Flat key=value configuration format used by the CLI. Keys: L, n, dt,
// t_end, p, gamma, omega, blowup_gradient_factor, blowup_peak_factor,
// conservation_abort_rel, linear_solver_tol, record_stride,
// nonlinear_coupling, membership_mass_rel, membership_margin.
// '#' starts a comment; the first seven keys are required.
SimConfig parse_sim_config(std::istream& in);

} // namespace dnls
