// Command-line front end: threshold tables and sweeps, standing-wave reports,
// regime classification, simulations, blowup experiments, and virial checks.
// All data files are CSV at 15 significant digits; summaries are JSON on
// stdout, errors are JSON on stderr (exit 2 for argument/domain problems,
// exit 1 for numerical failures).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnls/errors.hpp"
#include "dnls/evolve.hpp"
#include "dnls/format.hpp"
#include "dnls/grid.hpp"
#include "dnls/soliton.hpp"
#include "dnls/thresholds.hpp"

namespace {

using nlohmann::json;

// Numbers carried through raw JSON so they are formatted by the same
// 15-digit rule as the CSV files.
json num(double value) {
    if (std::isfinite(value))
        return json::parse(dnls::g15(value));
    return nullptr;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw dnls::domain_error("cannot open output file '" + path + "'");
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw dnls::domain_error("cannot open input file '" + path + "'");
    return in;
}

json classification_json(const dnls::RegimeClassification& rc, const dnls::SolitonParams& params) {
    json j;
    j["p"] = num(params.p);
    j["gamma"] = num(params.gamma);
    j["omega"] = num(params.omega);
    j["xi"] = num(rc.xi);
    j["supercritical"] = rc.supercritical;
    j["xi0"] = num(rc.xi0);
    j["xi1"] = num(rc.xi1);
    j["xi2"] = num(rc.xi2);
    j["omega0"] = num(rc.omega0);
    j["omega1"] = num(rc.omega1);
    j["omega2"] = num(rc.omega2);
    j["mass_derivative_negative"] = rc.mass_derivative_negative;
    j["energy_positive"] = rc.energy_positive;
    j["slope_condition"] = rc.slope_condition;
    j["label"] = dnls::stability_label_name(rc.label);
    return j;
}

json report_json(const dnls::QuantityReport& rep) {
    json j;
    j["mass"] = num(rep.mass);
    j["boundary_sq"] = num(rep.boundary_sq);
    j["lp_norm"] = num(rep.lp_norm);
    j["grad_sq"] = num(rep.grad_sq);
    j["energy"] = num(rep.energy);
    j["action"] = num(rep.action);
    j["nehari"] = num(rep.nehari);
    j["virial"] = num(rep.virial);
    j["near_threshold_warning"] = rep.near_threshold_warning;
    return j;
}

json membership_json(const dnls::MembershipReport& rep) {
    json j;
    j["member"] = rep.member;
    j["energy_window"] = rep.energy_window;
    j["mass_match"] = rep.mass_match;
    j["virial_negative"] = rep.virial_negative;
    j["nehari_negative"] = rep.nehari_negative;
    j["energy"] = num(rep.energy);
    j["energy_phi"] = num(rep.energy_phi);
    j["mass"] = num(rep.mass);
    j["mass_phi"] = num(rep.mass_phi);
    j["P"] = num(rep.virial_P);
    j["K"] = num(rep.nehari_K);
    return j;
}

json outcome_json(const dnls::Trace& trace) {
    json j;
    j["outcome"] = dnls::outcome_name(trace.outcome);
    j["t_star"] = num(trace.t_star);
    j["reason"] = trace.reason;
    j["records"] = trace.records.size();
    j["max_solver_residual"] = num(trace.max_solver_residual);
    return j;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Standing waves of the 1-D NLS with an attractive point defect: "
                 "profiles, stability thresholds, and blowup experiments"};
    app.require_subcommand(1);

    // thresholds
    auto* cmd_thresholds = app.add_subcommand("thresholds", "Threshold values at one p");
    double th_p = 0.0, th_gamma = 0.0;
    cmd_thresholds->add_option("--p", th_p, "nonlinearity power, > 5")->required();
    cmd_thresholds->add_option("--gamma", th_gamma, "defect strength; adds frequency thresholds");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Threshold curves over a range of p");
    double sw_lo = 0.0, sw_hi = 0.0;
    int sw_n = 0;
    std::string sw_out;
    cmd_sweep->add_option("--lo", sw_lo, "lower end of the p range, > 5")->required();
    cmd_sweep->add_option("--hi", sw_hi, "upper end of the p range")->required();
    cmd_sweep->add_option("--n", sw_n, "grid points, >= 2")->required();
    cmd_sweep->add_option("--out", sw_out, "output CSV path")->required();

    // profile
    auto* cmd_profile = app.add_subcommand("profile", "Sample a standing wave and report its quantities");
    double pr_p = 0.0, pr_gamma = 0.0, pr_omega = 0.0, pr_L = 30.0;
    int pr_n = 12001;
    std::string pr_out;
    cmd_profile->add_option("--p", pr_p)->required();
    cmd_profile->add_option("--gamma", pr_gamma)->required();
    cmd_profile->add_option("--omega", pr_omega)->required();
    cmd_profile->add_option("--L", pr_L, "grid half-width");
    cmd_profile->add_option("--n", pr_n, "odd node count");
    cmd_profile->add_option("--out", pr_out, "grid CSV path");

    // classify
    auto* cmd_classify = app.add_subcommand("classify", "Stability regime of one parameter triple");
    double cl_p = 0.0, cl_gamma = 0.0, cl_omega = 0.0;
    cmd_classify->add_option("--p", cl_p)->required();
    cmd_classify->add_option("--gamma", cl_gamma)->required();
    cmd_classify->add_option("--omega", cl_omega)->required();

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "Evolve initial data from a config file");
    std::string sim_config, sim_initial, sim_out;
    cmd_simulate->add_option("--config", sim_config, "key=value config file")->required();
    cmd_simulate->add_option("--initial", sim_initial, "initial data CSV (x,re,im)")->required();
    cmd_simulate->add_option("--out", sim_out, "trace CSV path")->required();

    // blowup
    auto* cmd_blowup = app.add_subcommand("blowup", "Scaled standing-wave blowup experiment");
    double bl_p = 0.0, bl_gamma = 0.0, bl_omega = 0.0, bl_lambda = 0.0;
    double bl_L = 15.0, bl_dt = 1e-4, bl_tend = 5.0;
    int bl_n = 6001, bl_stride = 10;
    double bl_gf = 10.0, bl_pf = 8.0, bl_abort = 1e-4, bl_solver = 1e-12;
    std::string bl_out;
    cmd_blowup->add_option("--p", bl_p)->required();
    cmd_blowup->add_option("--gamma", bl_gamma)->required();
    cmd_blowup->add_option("--omega", bl_omega)->required();
    cmd_blowup->add_option("--lambda", bl_lambda, "scaling of the sampled wave")->required();
    cmd_blowup->add_option("--L", bl_L, "grid half-width");
    cmd_blowup->add_option("--n", bl_n, "odd node count");
    cmd_blowup->add_option("--dt", bl_dt, "time step");
    cmd_blowup->add_option("--t-end", bl_tend, "final time");
    cmd_blowup->add_option("--stride", bl_stride, "record every k-th step");
    cmd_blowup->add_option("--gradient-factor", bl_gf, "blowup gradient growth factor");
    cmd_blowup->add_option("--peak-factor", bl_pf, "blowup peak growth factor");
    cmd_blowup->add_option("--abort-rel", bl_abort, "conservation abort bound");
    cmd_blowup->add_option("--solver-tol", bl_solver, "linear solve residual bound");
    cmd_blowup->add_option("--out", bl_out, "trace CSV path")->required();

    // virial-check
    auto* cmd_virial = app.add_subcommand("virial-check", "Virial-identity residual of a trace file");
    std::string vc_trace;
    cmd_virial->add_option("--trace", vc_trace, "trace CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"type", "argument"}, {"message", e.what()}}}}.dump()
                  << '\n';
        return 2;
    }

    if (cmd_thresholds->parsed()) {
        if (!(th_p > 5.0))
            throw dnls::domain_error("thresholds: p must exceed 5");
        json j;
        j["p"] = num(th_p);
        j["xi0"] = num(dnls::threshold_xi(dnls::ThresholdKind::Xi0, th_p));
        j["xi1"] = num(dnls::threshold_xi(dnls::ThresholdKind::Xi1, th_p));
        j["xi2"] = num(dnls::threshold_xi(dnls::ThresholdKind::Xi2, th_p));
        if (cmd_thresholds->count("--gamma")) {
            j["gamma"] = num(th_gamma);
            j["omega0"] = num(dnls::omega_threshold(dnls::ThresholdKind::Xi0, th_p, th_gamma));
            j["omega1"] = num(dnls::omega_threshold(dnls::ThresholdKind::Xi1, th_p, th_gamma));
            j["omega2"] = num(dnls::omega_threshold(dnls::ThresholdKind::Xi2, th_p, th_gamma));
        }
        std::cout << j.dump() << '\n';
        return 0;
    }

    if (cmd_sweep->parsed()) {
        const auto rows = dnls::sweep(sw_lo, sw_hi, sw_n);
        auto out = open_output(sw_out);
        dnls::write_sweep_csv(out, rows);
        json j;
        j["rows"] = rows.size();
        size_t failures = 0;
        for (const auto& row : rows)
            if (!row.error.empty())
                ++failures;
        j["failed_rows"] = failures;
        j["out"] = sw_out;
        std::cout << j.dump() << '\n';
        return 0;
    }

    if (cmd_profile->parsed()) {
        const dnls::SolitonParams params{pr_p, pr_gamma, pr_omega};
        params.validate();
        const dnls::QuantityReport rep = dnls::quantity_report(params);
        if (!pr_out.empty()) {
            const dnls::Grid grid{pr_L, pr_n};
            const dnls::GridFunction fn = dnls::sample_profile(grid, params);
            auto out = open_output(pr_out);
            dnls::write_grid_csv(out, fn);
        }
        std::cout << report_json(rep).dump() << '\n';
        return 0;
    }

    if (cmd_classify->parsed()) {
        const dnls::SolitonParams params{cl_p, cl_gamma, cl_omega};
        const dnls::RegimeClassification rc = dnls::classify(params);
        std::cout << classification_json(rc, params).dump() << '\n';
        return 0;
    }

    if (cmd_simulate->parsed()) {
        auto cfg_in = open_input(sim_config);
        dnls::SimConfig cfg = dnls::parse_sim_config(cfg_in);
        auto init_in = open_input(sim_initial);
        const dnls::GridFunction u0 = dnls::read_grid_csv(init_in);
        if (!(u0.grid == cfg.grid))
            throw dnls::domain_error("simulate: initial data grid does not match the config grid");
        const dnls::Trace trace = dnls::run(u0, cfg);
        auto out = open_output(sim_out);
        dnls::write_trace_csv(out, trace);
        std::cout << outcome_json(trace).dump() << '\n';
        return 0;
    }

    if (cmd_blowup->parsed()) {
        const dnls::SolitonParams params{bl_p, bl_gamma, bl_omega};
        dnls::SimConfig cfg;
        cfg.grid = dnls::Grid{bl_L, bl_n};
        cfg.dt = bl_dt;
        cfg.t_end = bl_tend;
        cfg.record_stride = bl_stride;
        cfg.blowup_gradient_factor = bl_gf;
        cfg.blowup_peak_factor = bl_pf;
        cfg.conservation_abort_rel = bl_abort;
        cfg.linear_solver_tol = bl_solver;
        const dnls::BlowupReport report = dnls::blowup_experiment(params, bl_lambda, cfg);
        auto out = open_output(bl_out);
        dnls::write_trace_csv(out, report.trace);
        json j;
        j["lambda"] = num(report.lambda);
        j["b_defined"] = report.b_defined;
        j["membership"] = report.b_defined ? membership_json(report.membership)
                                           : json{{"member", false}, {"note", "undefined_set"}};
        j["outcome"] = dnls::outcome_name(report.trace.outcome);
        j["t_star"] = num(report.trace.t_star);
        j["p_negative_throughout"] = report.p_negative_throughout;
        std::cout << j.dump() << '\n';
        return 0;
    }

    if (cmd_virial->parsed()) {
        auto in = open_input(vc_trace);
        const dnls::Trace trace = dnls::read_trace_csv(in);
        const double residual = dnls::virial_residual(trace);
        json j;
        j["residual"] = num(residual);
        j["records"] = trace.records.size();
        std::cout << j.dump() << '\n';
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const dnls::domain_error& e) {
        std::cerr << json{{"error", {{"type", "domain"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    } catch (const dnls::numeric_error& e) {
        std::cerr << json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}.dump() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << json{{"error", {{"type", "domain"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << '\n';
        return 1;
    }
}
