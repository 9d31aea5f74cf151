#include "dnls/evolve.hpp"

#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dnls/errors.hpp"
#include "dnls/format.hpp"

namespace dnls {

namespace {

using cd = std::complex<double>;

// |u|^(p-1) = norm(u)^alpha with the common alphas special-cased; the
// nonlinear phase is evaluated once per node per half-kick, so this is the
// hottest scalar function of a long run.
double pow_alpha(double nrm, double alpha) {
    if (alpha == 1.0)
        return nrm;
    if (alpha == 2.0)
        return nrm * nrm;
    if (alpha == 2.5)
        return nrm * nrm * std::sqrt(nrm);
    if (nrm == 0.0)
        return 0.0;
    return std::pow(nrm, alpha);
}

class Stepper {
public:
    explicit Stepper(const SimConfig& config)
        : cfg_(config),
          n_(config.grid.node_count),
          h_(config.grid.step()),
          theta_(0.5 * config.dt),
          alpha_((config.params.p - 1.0) / 2.0) {
        const int m = n_ - 2; // interior nodes
        const cd i_theta(0.0, theta_);
        off_ = -i_theta / (h_ * h_);
        diag_.resize(m);
        for (int j = 0; j < m; ++j) {
            double hj = 2.0 / (h_ * h_);
            if (j + 1 == config.grid.center())
                hj -= config.params.gamma / h_;
            diag_[j] = 1.0 + i_theta * hj;
        }
        // Thomas factorization of the constant tridiagonal (off, diag, off).
        cprime_.resize(m);
        inv_denom_.resize(m);
        cd denom = diag_[0];
        inv_denom_[0] = 1.0 / denom;
        cprime_[0] = off_ * inv_denom_[0];
        for (int j = 1; j < m; ++j) {
            denom = diag_[j] - off_ * cprime_[j - 1];
            if (denom == cd(0.0, 0.0))
                throw numeric_error("linear step: singular tridiagonal factorization");
            inv_denom_[j] = 1.0 / denom;
            cprime_[j] = off_ * inv_denom_[j];
        }
        rhs_.resize(m);
        sol_.resize(m);
    }

    void advance(std::vector<cd>& u, bool check_residual) {
        half_kick(u);
        linear_step(u, check_residual);
        half_kick(u);
    }

    double max_solver_residual() const { return max_residual_; }

private:
    void half_kick(std::vector<cd>& u) const {
        const double g = cfg_.nonlinear_coupling;
        if (g == 0.0)
            return;
        for (cd& value : u) {
            const double phase = g * theta_ * pow_alpha(std::norm(value), alpha_);
            value *= cd(std::cos(phase), std::sin(phase));
        }
    }

    void linear_step(std::vector<cd>& u, bool check_residual) {
        const int m = n_ - 2;
        u[0] = 0.0;
        u[n_ - 1] = 0.0;
        // rhs = (I - i theta H) u on the interior; conj of the diagonal works
        // because diag = 1 + i theta h_j with real h_j.
        for (int j = 0; j < m; ++j) {
            const cd self = std::conj(diag_[j]) * u[j + 1];
            const cd neighbors = -off_ * (u[j] + u[j + 2]);
            rhs_[j] = self + neighbors;
        }
        sol_[0] = rhs_[0] * inv_denom_[0];
        for (int j = 1; j < m; ++j)
            sol_[j] = (rhs_[j] - off_ * sol_[j - 1]) * inv_denom_[j];
        for (int j = m - 2; j >= 0; --j)
            sol_[j] -= cprime_[j] * sol_[j + 1];

        if (check_residual) {
            double rmax = 0.0, bmax = 0.0;
            for (int j = 0; j < m; ++j) {
                cd ax = diag_[j] * sol_[j];
                if (j > 0)
                    ax += off_ * sol_[j - 1];
                if (j + 1 < m)
                    ax += off_ * sol_[j + 1];
                rmax = std::max(rmax, std::abs(ax - rhs_[j]));
                bmax = std::max(bmax, std::abs(rhs_[j]));
            }
            const double rel = bmax > 0.0 ? rmax / bmax : 0.0;
            max_residual_ = std::max(max_residual_, rel);
            if (rel > cfg_.linear_solver_tol)
                throw numeric_error("linear step: solve residual " + g15(rel)
                                    + " exceeds tolerance " + g15(cfg_.linear_solver_tol));
        }

        for (int j = 0; j < m; ++j)
            u[j + 1] = sol_[j];
        u[0] = 0.0;
        u[n_ - 1] = 0.0;
    }

    const SimConfig& cfg_;
    int n_;
    double h_;
    double theta_;
    double alpha_;
    cd off_;
    std::vector<cd> diag_, cprime_, inv_denom_, rhs_, sol_;
    double max_residual_ = 0.0;
};

struct Monitor {
    FunctionalValues f;
    double peak_sq = 0.0;
    double virial = 0.0;
};

Monitor measure(const std::vector<cd>& u, const SimConfig& cfg) {
    Monitor m;
    m.f = functionals(cfg.grid, u, cfg.params.p, cfg.params.gamma, cfg.params.omega);
    const Grid& grid = cfg.grid;
    const int n = grid.node_count;
    for (int j = 0; j < n; ++j) {
        const double nrm = std::norm(u[j]);
        const double x = grid.node(j);
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        m.virial += w * x * x * nrm;
        m.peak_sq = std::max(m.peak_sq, nrm);
    }
    m.virial *= grid.step();
    return m;
}

TraceRecord make_record(double t, const Monitor& m, const SimConfig& cfg,
                        bool b_defined, double mass_phi, double energy_phi) {
    TraceRecord rec;
    rec.t = t;
    rec.mass = m.f.mass;
    rec.grad_sq = m.f.grad_sq;
    rec.peak_sq = m.peak_sq;
    rec.boundary_sq = m.f.boundary_sq;
    rec.virial = m.virial;
    // The conserved functionals of the equation actually integrated carry the
    // coupling on the nonlinear term (identical to the plain ones at 1).
    const double p = cfg.params.p;
    const double gamma = cfg.params.gamma;
    const double coupled_lp = cfg.nonlinear_coupling * m.f.lp;
    rec.energy = 0.5 * m.f.grad_sq - 0.5 * gamma * m.f.boundary_sq - coupled_lp / (p + 1.0);
    rec.P = m.f.grad_sq - 0.5 * gamma * m.f.boundary_sq
            - 0.5 * (p - 1.0) * coupled_lp / (p + 1.0);
    rec.K = m.f.grad_sq + cfg.params.omega * m.f.mass - gamma * m.f.boundary_sq - coupled_lp;
    if (b_defined) {
        const MembershipTolerances& tol = cfg.membership_tol;
        rec.in_B = rec.energy > tol.margin && rec.energy < energy_phi - tol.margin
                   && std::abs(rec.mass - mass_phi) <= tol.mass_rel * mass_phi
                   && rec.P < -tol.margin && rec.K < -tol.margin;
    }
    return rec;
}

} // namespace

void SimConfig::validate() const {
    grid.validate();
    if (!(dt > 0.0))
        throw domain_error("SimConfig: dt must be positive");
    if (!(t_end > 0.0))
        throw domain_error("SimConfig: t_end must be positive");
    if (!(params.p > 1.0))
        throw domain_error("SimConfig: p must exceed 1");
    if (!(blowup_gradient_factor > 1.0) || !(blowup_peak_factor > 1.0))
        throw domain_error("SimConfig: blowup factors must exceed 1");
    if (!(conservation_abort_rel > 0.0))
        throw domain_error("SimConfig: conservation_abort_rel must be positive");
    if (!(linear_solver_tol > 0.0))
        throw domain_error("SimConfig: linear_solver_tol must be positive");
    if (record_stride < 1)
        throw domain_error("SimConfig: record_stride must be >= 1");
    if (nonlinear_coupling < 0.0)
        throw domain_error("SimConfig: nonlinear_coupling must be nonnegative");
}

const char* outcome_name(Outcome outcome) {
    switch (outcome) {
    case Outcome::completed: return "completed";
    case Outcome::blowup_detected: return "blowup_detected";
    case Outcome::conservation_violation: return "conservation_violation";
    }
    return "?";
}

GridFunction step(const GridFunction& u, const SimConfig& config) {
    config.validate();
    u.validate();
    if (!(u.grid == config.grid))
        throw domain_error("step: grid function does not live on the configured grid");
    GridFunction out = u;
    Stepper stepper(config);
    stepper.advance(out.values, true);
    return out;
}

Trace run(const GridFunction& u0, const SimConfig& config) {
    config.validate();
    u0.validate();
    if (!(u0.grid == config.grid))
        throw domain_error("run: initial data does not live on the configured grid");

    // Standing-wave bookkeeping for the in_B flag; undefined unless the
    // parameters are admissible and the wave has positive energy.
    bool b_defined = false;
    double mass_phi = 0.0, energy_phi = 0.0;
    if (config.nonlinear_coupling == 1.0) {
        try {
            config.params.validate();
            energy_phi = energy_closed_form(config.params);
            if (energy_phi > 0.0) {
                mass_phi = mass_closed_form(config.params);
                b_defined = true;
            }
        } catch (const domain_error&) {
        }
    }

    Trace trace;
    trace.t_star = std::numeric_limits<double>::quiet_NaN();
    std::vector<cd> u = u0.values;
    Stepper stepper(config);

    const Monitor m0 = measure(u, config);
    trace.records.push_back(make_record(0.0, m0, config, b_defined, mass_phi, energy_phi));
    const TraceRecord rec0 = trace.records.front();
    const double energy_scale = std::max(
        1e-300, 0.5 * m0.f.grad_sq + 0.5 * std::abs(config.params.gamma) * m0.f.boundary_sq
                    + m0.f.lp / (config.params.p + 1.0));
    const double gf2 = config.blowup_gradient_factor * config.blowup_gradient_factor;
    const double pf2 = config.blowup_peak_factor * config.blowup_peak_factor;
    const double mass0 = rec0.mass;
    const double energy0 = rec0.energy;
    const double grad0 = rec0.grad_sq;
    const double peak0 = rec0.peak_sq;

    // The collapse burst can be much narrower than the record stride, so the
    // cheap growth and mass checks run every step; the energy check (which
    // needs the full nonlinear term) runs at record cadence.
    const long long n_steps = std::max<long long>(1, std::llround(config.t_end / config.dt));
    const int n = config.grid.node_count;
    const double h = config.grid.step();
    for (long long k = 1; k <= n_steps; ++k) {
        const bool record_now = (k % config.record_stride == 0) || k == n_steps;
        stepper.advance(u, record_now);
        const double t = k * config.dt;

        double mass = 0.0, grad = 0.0, peak = 0.0;
        for (int j = 0; j < n; ++j) {
            const double nrm = std::norm(u[j]);
            mass += (j == 0 || j == n - 1) ? 0.5 * nrm : nrm;
            peak = std::max(peak, nrm);
            if (j + 1 < n)
                grad += std::norm(u[j + 1] - u[j]);
        }
        mass *= h;
        grad /= h;

        const double mass_drift = mass0 > 0.0 ? std::abs(mass - mass0) / mass0 : 0.0;
        const bool growth = grad0 > 0.0 && peak0 > 0.0 && grad >= gf2 * grad0
                            && peak >= pf2 * peak0;
        const bool stopping = growth || mass_drift > config.conservation_abort_rel;

        if (record_now || stopping) {
            const Monitor m = measure(u, config);
            trace.records.push_back(make_record(t, m, config, b_defined, mass_phi, energy_phi));
        }
        if (growth && mass_drift <= config.conservation_abort_rel) {
            trace.outcome = Outcome::blowup_detected;
            trace.t_star = t;
            trace.reason = "gradient and peak growth factors reached with mass intact";
            break;
        }
        if (mass_drift > config.conservation_abort_rel) {
            trace.outcome = Outcome::conservation_violation;
            trace.t_star = t;
            trace.reason = "mass drift " + g15(mass_drift) + " exceeds bound";
            break;
        }
        if (record_now) {
            // Energy drift counts as a violation only before focusing sets
            // in; afterwards it is the splitting error of the collapsing peak.
            const TraceRecord& rec = trace.records.back();
            const bool focusing = grad0 > 0.0
                                  && (grad >= 1.5 * grad0 || peak >= 1.5 * peak0);
            const double energy_drift = std::abs(rec.energy - energy0) / energy_scale;
            if (!focusing && energy_drift > config.conservation_abort_rel) {
                trace.outcome = Outcome::conservation_violation;
                trace.t_star = t;
                trace.reason = "energy drift " + g15(energy_drift) + " exceeds bound";
                break;
            }
        }
    }

    trace.max_solver_residual = stepper.max_solver_residual();
    return trace;
}

double virial_residual(const Trace& trace) {
    const auto& recs = trace.records;
    if (recs.size() < 3)
        throw domain_error("virial_residual: needs at least 3 records");
    const double tau = recs[1].t - recs[0].t;
    if (!(tau > 0.0))
        throw domain_error("virial_residual: record times are not increasing");

    // Uniformly spaced prefix; a final off-stride record is excluded.
    size_t m = 2;
    while (m < recs.size()
           && std::abs(recs[m].t - recs[0].t - double(m) * tau) <= 1e-9 * std::max(1.0, recs[m].t))
        ++m;
    if (m < 3)
        throw domain_error("virial_residual: needs at least 3 uniformly spaced records");

    double worst = 0.0;
    for (size_t i = 1; i + 1 < m; ++i) {
        const double d2v = (recs[i + 1].virial - 2.0 * recs[i].virial + recs[i - 1].virial)
                           / (tau * tau);
        const double rhs = 8.0 * recs[i].P;
        worst = std::max(worst, std::abs(d2v - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

BlowupReport blowup_experiment(const SolitonParams& params, double lambda,
                               SimConfig config) {
    params.validate();
    if (!(params.p > 5.0))
        throw domain_error("blowup_experiment: requires p > 5");
    if (!(lambda > 0.0))
        throw domain_error("blowup_experiment: lambda must be positive");
    config.params = params;
    config.validate();

    BlowupReport report;
    report.lambda = lambda;
    const GridFunction u0 = scale(sample_profile(config.grid, params), lambda).fn;

    report.b_defined = energy_closed_form(params) > 0.0;
    if (report.b_defined)
        report.membership = membership_B(u0, params, config.membership_tol);

    report.trace = run(u0, config);
    // "until detection": the snapshot taken at the detection step itself is
    // already the unresolved burst and is not part of the claim.
    size_t until = report.trace.records.size();
    if (report.trace.outcome == Outcome::blowup_detected && until > 0)
        --until;
    report.p_negative_throughout = true;
    for (size_t i = 0; i < until; ++i)
        if (!(report.trace.records[i].P < 0.0))
            report.p_negative_throughout = false;
    return report;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,mass,energy,grad_sq,peak_sq,boundary_sq,virial,P,K,in_B\n";
    for (const TraceRecord& r : trace.records)
        out << g15(r.t) << ',' << g15(r.mass) << ',' << g15(r.energy) << ','
            << g15(r.grad_sq) << ',' << g15(r.peak_sq) << ',' << g15(r.boundary_sq)
            << ',' << g15(r.virial) << ',' << g15(r.P) << ',' << g15(r.K) << ','
            << (r.in_B ? 1 : 0) << '\n';
    nlohmann::json outcome;
    outcome["outcome"] = outcome_name(trace.outcome);
    if (std::isnan(trace.t_star))
        outcome["t_star"] = nullptr;
    else
        outcome["t_star"] = trace.t_star;
    outcome["reason"] = trace.reason;
    out << outcome.dump() << '\n';
}

Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw domain_error("trace csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "t,mass,energy,grad_sq,peak_sq,boundary_sq,virial,P,K,in_B")
        throw domain_error("trace csv: unexpected header");

    Trace trace;
    trace.t_star = std::numeric_limits<double>::quiet_NaN();
    bool saw_outcome = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '{') {
            const nlohmann::json j = nlohmann::json::parse(line);
            const std::string name = j.at("outcome").get<std::string>();
            if (name == "completed")
                trace.outcome = Outcome::completed;
            else if (name == "blowup_detected")
                trace.outcome = Outcome::blowup_detected;
            else if (name == "conservation_violation")
                trace.outcome = Outcome::conservation_violation;
            else
                throw domain_error("trace csv: unknown outcome '" + name + "'");
            if (j.contains("t_star") && !j.at("t_star").is_null())
                trace.t_star = j.at("t_star").get<double>();
            if (j.contains("reason"))
                trace.reason = j.at("reason").get<std::string>();
            saw_outcome = true;
            break;
        }
        std::istringstream row(line);
        std::string field;
        double parts[10];
        for (int k = 0; k < 10; ++k) {
            if (!std::getline(row, field, ','))
                throw domain_error("trace csv: row with fewer than 10 fields");
            size_t used = 0;
            parts[k] = std::stod(field, &used);
            if (used != field.size())
                throw domain_error("trace csv: malformed number '" + field + "'");
        }
        TraceRecord rec;
        rec.t = parts[0];
        rec.mass = parts[1];
        rec.energy = parts[2];
        rec.grad_sq = parts[3];
        rec.peak_sq = parts[4];
        rec.boundary_sq = parts[5];
        rec.virial = parts[6];
        rec.P = parts[7];
        rec.K = parts[8];
        rec.in_B = parts[9] != 0.0;
        trace.records.push_back(rec);
    }
    (void)saw_outcome;
    return trace;
}

SimConfig parse_sim_config(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw domain_error("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t\r");
            const size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        size_t used = 0;
        double parsed = 0.0;
        try {
            parsed = std::stod(value, &used);
        } catch (const std::exception&) {
            throw domain_error("config line " + std::to_string(lineno) + ": malformed value");
        }
        if (used != value.size())
            throw domain_error("config line " + std::to_string(lineno) + ": malformed value");
        if (!kv.emplace(key, parsed).second)
            throw domain_error("config: duplicate key '" + key + "'");
    }

    SimConfig cfg;
    auto take = [&](const std::string& key, double* slot, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                throw domain_error("config: missing required key '" + key + "'");
            return;
        }
        *slot = it->second;
        kv.erase(it);
    };
    double L = 0.0, n = 0.0, stride = cfg.record_stride;
    take("L", &L, true);
    take("n", &n, true);
    take("dt", &cfg.dt, true);
    take("t_end", &cfg.t_end, true);
    take("p", &cfg.params.p, true);
    take("gamma", &cfg.params.gamma, true);
    take("omega", &cfg.params.omega, true);
    take("blowup_gradient_factor", &cfg.blowup_gradient_factor, false);
    take("blowup_peak_factor", &cfg.blowup_peak_factor, false);
    take("conservation_abort_rel", &cfg.conservation_abort_rel, false);
    take("linear_solver_tol", &cfg.linear_solver_tol, false);
    take("record_stride", &stride, false);
    take("nonlinear_coupling", &cfg.nonlinear_coupling, false);
    take("membership_mass_rel", &cfg.membership_tol.mass_rel, false);
    take("membership_margin", &cfg.membership_tol.margin, false);
    if (!kv.empty())
        throw domain_error("config: unknown key '" + kv.begin()->first + "'");

    cfg.grid.half_width = L;
    if (n != std::floor(n) || n < 3.0 || n > 2e9)
        throw domain_error("config: n must be an integer >= 3");
    cfg.grid.node_count = static_cast<int>(n);
    if (stride != std::floor(stride) || stride < 1.0 || stride > 2e9)
        throw domain_error("config: record_stride must be a positive integer");
    cfg.record_stride = static_cast<int>(stride);
    cfg.validate();
    return cfg;
}

} // namespace dnls
