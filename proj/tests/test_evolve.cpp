#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/evolve.hpp"

using namespace dnls;

namespace {

GridFunction gaussian(const Grid& grid, double sigma) {
    GridFunction fn;
    fn.grid = grid;
    fn.values.resize(grid.node_count);
    for (int j = 0; j < grid.node_count; ++j) {
        const double x = grid.node(j);
        fn.values[j] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return fn;
}

// Squared discrete H1 distance to the phase-optimal rotation of phi.
double orbit_distance_sq(const GridFunction& u, const GridFunction& phi) {
    const double h = u.grid.step();
    std::complex<double> inner = 0.0;
    double norm_u = 0.0, norm_phi = 0.0;
    for (int j = 0; j < u.grid.node_count; ++j) {
        inner += u.values[j] * std::conj(phi.values[j]) * h;
        norm_u += std::norm(u.values[j]) * h;
        norm_phi += std::norm(phi.values[j]) * h;
        if (j + 1 < u.grid.node_count) {
            const auto du = (u.values[j + 1] - u.values[j]);
            const auto dphi = (phi.values[j + 1] - phi.values[j]);
            inner += du * std::conj(dphi) / h;
            norm_u += std::norm(du) / h;
            norm_phi += std::norm(dphi) / h;
        }
    }
    return norm_u + norm_phi - 2.0 * std::abs(inner);
}

} // namespace

TEST_CASE("the zero field stays zero") {
    SimConfig cfg;
    cfg.grid = Grid{5.0, 101};
    cfg.dt = 1e-2;
    cfg.t_end = 0.1;
    cfg.params = {6.0, 1.0, 4.0};
    GridFunction u;
    u.grid = cfg.grid;
    u.values.assign(101, 0.0);
    const GridFunction next = step(u, cfg);
    for (const auto& value : next.values)
        CHECK(value == std::complex<double>(0.0, 0.0));
    const Trace trace = run(u, cfg);
    CHECK(trace.outcome == Outcome::completed);
}

TEST_CASE("free evolution of a Gaussian follows the analytic width law") {
    SimConfig cfg;
    cfg.grid = Grid{20.0, 4001}; // h = 0.01
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.params = {6.0, 0.0, 1.0}; // no defect
    cfg.nonlinear_coupling = 0.0; // no nonlinearity
    cfg.record_stride = 100;

    const GridFunction u0 = gaussian(cfg.grid, 1.0);
    const Trace trace = run(u0, cfg);
    REQUIRE(trace.outcome == Outcome::completed);

    // |u(t)|^2 = (1/|s|) exp(-x^2/|s|^2) with s = 1 + 2it, so the variance
    // integral grows as 1 + 4 t^2.
    const double v0 = trace.records.front().virial;
    for (const TraceRecord& rec : trace.records) {
        const double expected = 1.0 + 4.0 * rec.t * rec.t;
        CAPTURE(rec.t);
        CHECK(rec.virial / v0 == Catch::Approx(expected).epsilon(1e-4));
    }
    CHECK(std::abs(trace.records.back().mass / trace.records.front().mass - 1.0) < 1e-10);
}

TEST_CASE("linear defect bound state: stationary amplitude, phase rate gamma^2/4") {
    SimConfig cfg;
    cfg.grid = Grid{30.0, 12001}; // h = 0.005
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.params = {6.0, 1.0, 1.0};
    cfg.nonlinear_coupling = 0.0;

    GridFunction u;
    u.grid = cfg.grid;
    u.values.resize(cfg.grid.node_count);
    for (int j = 0; j < cfg.grid.node_count; ++j)
        u.values[j] = std::exp(-0.5 * std::abs(cfg.grid.node(j)));

    const double amp0 = std::abs(u.values[cfg.grid.center()]);
    std::vector<double> phases;
    double max_amp_dev = 0.0;
    const int steps = 1000, stride = 10;
    for (int k = 0; k < steps; ++k) {
        u = step(u, cfg);
        if ((k + 1) % stride == 0) {
            const auto center = u.values[cfg.grid.center()];
            max_amp_dev = std::max(max_amp_dev, std::abs(std::abs(center) / amp0 - 1.0));
            phases.push_back(std::arg(center));
        }
    }
    CHECK(max_amp_dev <= 1e-5);

    // unwrap and fit the rate by the endpoints; expected +gamma^2/4
    double unwrapped = phases.front();
    double previous = phases.front();
    for (size_t i = 1; i < phases.size(); ++i) {
        double delta = phases[i] - previous;
        while (delta > M_PI) delta -= 2.0 * M_PI;
        while (delta < -M_PI) delta += 2.0 * M_PI;
        unwrapped += delta;
        previous = phases[i];
    }
    const double elapsed = (phases.size() - 1) * stride * cfg.dt;
    const double rate = (unwrapped - phases.front()) / elapsed;
    const double expected_rate = cfg.params.gamma * cfg.params.gamma / 4.0;
    CHECK(std::abs(rate - expected_rate) <= 1e-4);
}

TEST_CASE("mass conservation and solver residual on a generic smooth field") {
    SimConfig cfg;
    cfg.grid = Grid{10.0, 2001};
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.params = {6.0, 1.0, 4.0};

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> center(-2.0, 2.0);
    std::uniform_real_distribution<double> width(0.5, 1.5);
    std::uniform_real_distribution<double> wavenumber(0.0, 2.0);
    GridFunction u;
    u.grid = cfg.grid;
    u.values.assign(cfg.grid.node_count, 0.0);
    for (int b = 0; b < 3; ++b) {
        const double x0 = center(rng), w = width(rng), k = wavenumber(rng);
        for (int j = 0; j < cfg.grid.node_count; ++j) {
            const double x = cfg.grid.node(j);
            u.values[j] += std::exp(-(x - x0) * (x - x0) / (w * w))
                           * std::complex<double>(std::cos(k * x), std::sin(k * x));
        }
    }
    const Trace trace = run(u, cfg);
    REQUIRE(trace.outcome == Outcome::completed);
    for (const TraceRecord& rec : trace.records)
        CHECK(std::abs(rec.mass / trace.records.front().mass - 1.0) <= 1e-10);
    CHECK(trace.max_solver_residual <= cfg.linear_solver_tol);
}

TEST_CASE("energy drift shrinks ~4x when dt is halved") {
    SimConfig cfg;
    cfg.grid = Grid{20.0, 8001};
    cfg.t_end = 0.5;
    cfg.params = {3.0, 1.0, 4.0};
    cfg.record_stride = 100;
    GridFunction u0 = sample_profile(cfg.grid, cfg.params);
    for (auto& value : u0.values)
        value *= 1.05;

    auto drift = [&](double dt) {
        cfg.dt = dt;
        const Trace trace = run(u0, cfg);
        REQUIRE(trace.outcome == Outcome::completed);
        double worst = 0.0;
        for (const TraceRecord& rec : trace.records)
            worst = std::max(worst, std::abs(rec.energy - trace.records.front().energy));
        return worst;
    };
    const double coarse = drift(2e-3);
    const double fine = drift(1e-3);
    CHECK(coarse / fine == Catch::Approx(4.0).margin(1.5));
}

TEST_CASE("virial identity residual on a smooth run") {
    SimConfig cfg;
    cfg.grid = Grid{20.0, 32001};
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.params = {3.0, 1.0, 4.0};
    cfg.record_stride = 25; // record spacing 0.025
    GridFunction u0 = sample_profile(cfg.grid, cfg.params);
    for (auto& value : u0.values)
        value *= 1.05;
    const Trace trace = run(u0, cfg);
    REQUIRE(trace.outcome == Outcome::completed);
    CHECK(virial_residual(trace) <= 1e-2);
}

TEST_CASE("virial residual of the exact standing wave is tiny") {
    SimConfig cfg;
    cfg.grid = Grid{20.0, 16001};
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.params = {3.0, 1.0, 4.0};
    cfg.record_stride = 25;
    const GridFunction u0 = sample_profile(cfg.grid, cfg.params);
    const Trace trace = run(u0, cfg);
    REQUIRE(trace.outcome == Outcome::completed);
    CHECK(virial_residual(trace) <= 1e-3);

    Trace short_trace;
    short_trace.records.resize(2);
    short_trace.records[0].t = 0.0;
    short_trace.records[1].t = 0.1;
    CHECK_THROWS_AS(virial_residual(short_trace), dnls::domain_error);
}

TEST_CASE("blowup experiment in the strongly unstable regime") {
    const SolitonParams prm{6.0, 1.0, 20.0};
    SimConfig cfg;
    cfg.grid = Grid{15.0, 6001};
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.record_stride = 10;
    cfg.blowup_peak_factor = 4.0; // the 8x default is unreachable on a fixed grid

    const BlowupReport report = blowup_experiment(prm, 1.05, cfg);
    CHECK(report.b_defined);
    CHECK(report.membership.member);
    CHECK(report.trace.outcome == Outcome::blowup_detected);
    CHECK(report.p_negative_throughout);
    CHECK(report.trace.t_star > 0.0);
    CHECK(report.trace.t_star < 0.5);
    const double mass0 = report.trace.records.front().mass;
    const double mass_star = report.trace.records.back().mass;
    CHECK(std::abs(mass_star / mass0 - 1.0) <= 1e-6);
}

TEST_CASE("blowup experiment edge cases") {
    SimConfig cfg;
    cfg.grid = Grid{15.0, 6001};
    cfg.dt = 1e-4;
    cfg.t_end = 0.01;
    cfg.record_stride = 10;

    // below omega1 the wave energy is negative: the set is undefined but the
    // run still executes (the open regime is exposed as an experiment)
    const BlowupReport undefined = blowup_experiment({6.0, 1.0, 4.0}, 1.05, cfg);
    CHECK_FALSE(undefined.b_defined);
    CHECK_FALSE(undefined.membership.member);
    CHECK(undefined.trace.records.size() > 1);

    // lambda = 1 sits on the set boundary once the margin clears the
    // discretization offset
    cfg.membership_tol.margin = 4e-3;
    const BlowupReport boundary = blowup_experiment({6.0, 1.0, 20.0}, 1.0, cfg);
    CHECK(boundary.b_defined);
    CHECK_FALSE(boundary.membership.member);

    CHECK_THROWS_AS(blowup_experiment({3.0, 1.0, 4.0}, 1.05, cfg), dnls::domain_error);
}

TEST_CASE("the blowup set is invariant along the resolved flow") {
    const SolitonParams prm{6.0, 1.0, 20.0};
    SimConfig cfg;
    cfg.grid = Grid{15.0, 6001};
    cfg.dt = 2e-5; // resolved window: splitting error stays negligible
    cfg.t_end = 0.06;
    cfg.record_stride = 50;

    const BlowupReport report = blowup_experiment(prm, 1.05, cfg);
    REQUIRE(report.membership.member);
    REQUIRE(report.trace.records.size() >= 10);
    for (const TraceRecord& rec : report.trace.records) {
        CAPTURE(rec.t);
        CHECK(rec.in_B);
    }
}

TEST_CASE("stable regime control: perturbed subcritical wave stays near the orbit") {
    SimConfig cfg;
    cfg.grid = Grid{30.0, 6001};
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.params = {3.0, 1.0, 4.0};
    cfg.record_stride = 100;

    const GridFunction phi = sample_profile(cfg.grid, cfg.params);
    GridFunction u = phi;
    for (auto& value : u.values)
        value *= 1.01;

    const Trace trace = run(u, cfg);
    REQUIRE(trace.outcome == Outcome::completed);
    const double grad0 = trace.records.front().grad_sq;
    for (const TraceRecord& rec : trace.records)
        CHECK(rec.grad_sq <= 2.0 * grad0);

    // distance to the phase orbit of the wave, in the discrete H1 norm
    double phi_norm_sq = 0.0;
    for (int j = 0; j < phi.grid.node_count; ++j) {
        phi_norm_sq += std::norm(phi.values[j]) * phi.grid.step();
        if (j + 1 < phi.grid.node_count)
            phi_norm_sq += std::norm(phi.values[j + 1] - phi.values[j]) / phi.grid.step();
    }
    const int steps = 2000, stride = 200;
    GridFunction v = u;
    for (int k = 0; k < steps; ++k) {
        v = step(v, cfg);
        if ((k + 1) % stride == 0) {
            const double dist = std::sqrt(orbit_distance_sq(v, phi));
            CAPTURE(k);
            CHECK(dist < 0.05 * std::sqrt(phi_norm_sq));
        }
    }
}

TEST_CASE("trace CSV round trip") {
    SimConfig cfg;
    cfg.grid = Grid{10.0, 1001};
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.params = {3.0, 1.0, 4.0};
    cfg.record_stride = 10;
    GridFunction u0 = sample_profile(cfg.grid, cfg.params);
    for (auto& value : u0.values)
        value *= 1.02;
    const Trace trace = run(u0, cfg);

    std::ostringstream out;
    write_trace_csv(out, trace);
    std::istringstream in(out.str());
    const Trace back = read_trace_csv(in);

    REQUIRE(back.records.size() == trace.records.size());
    CHECK(back.outcome == trace.outcome);
    for (size_t i = 0; i < trace.records.size(); ++i) {
        CHECK(std::abs(back.records[i].virial - trace.records[i].virial)
              <= 1e-14 * std::max(1.0, std::abs(trace.records[i].virial)));
        CHECK(std::abs(back.records[i].P - trace.records[i].P)
              <= 1e-14 * std::max(1.0, std::abs(trace.records[i].P)));
    }
    const double res_direct = virial_residual(trace);
    const double res_parsed = virial_residual(back);
    CHECK(std::abs(res_parsed - res_direct) <= 1e-9 * std::max(1.0, res_direct));

    std::istringstream bad("t,mass\n0,1\n");
    CHECK_THROWS_AS(read_trace_csv(bad), dnls::domain_error);
}

TEST_CASE("flat key=value config parsing") {
    std::istringstream good(
        "# run setup\n"
        "L = 15\n"
        "n = 6001\n"
        "dt = 1e-4\n"
        "t_end = 0.5\n"
        "p = 6\n"
        "gamma = 1\n"
        "omega = 20  # monitored frequency\n"
        "record_stride = 20\n"
        "blowup_peak_factor = 4\n");
    const SimConfig cfg = parse_sim_config(good);
    CHECK(cfg.grid.node_count == 6001);
    CHECK(cfg.grid.half_width == 15.0);
    CHECK(cfg.dt == 1e-4);
    CHECK(cfg.params.omega == 20.0);
    CHECK(cfg.record_stride == 20);
    CHECK(cfg.blowup_peak_factor == 4.0);
    CHECK(cfg.conservation_abort_rel == 1e-4); // default kept

    std::istringstream unknown("L=15\nn=6001\ndt=1e-4\nt_end=1\np=6\ngamma=1\nomega=20\nbogus=1\n");
    CHECK_THROWS_AS(parse_sim_config(unknown), dnls::domain_error);
    std::istringstream missing("L=15\nn=6001\ndt=1e-4\n");
    CHECK_THROWS_AS(parse_sim_config(missing), dnls::domain_error);
    std::istringstream dup("L=15\nL=16\nn=6001\ndt=1e-4\nt_end=1\np=6\ngamma=1\nomega=20\n");
    CHECK_THROWS_AS(parse_sim_config(dup), dnls::domain_error);
}

TEST_CASE("mismatched grids are rejected") {
    SimConfig cfg;
    cfg.grid = Grid{10.0, 1001};
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.params = {3.0, 1.0, 4.0};
    GridFunction u;
    u.grid = Grid{10.0, 2001};
    u.values.assign(2001, 0.0);
    CHECK_THROWS_AS(run(u, cfg), dnls::domain_error);
    CHECK_THROWS_AS(step(u, cfg), dnls::domain_error);
}
