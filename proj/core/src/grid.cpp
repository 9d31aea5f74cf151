#include "dnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dnls/errors.hpp"
#include "dnls/format.hpp"

namespace dnls {

void Grid::validate() const {
    if (!(half_width > 0.0))
        throw domain_error("Grid: half_width must be positive");
    if (node_count < 3 || node_count % 2 == 0)
        throw domain_error("Grid: node_count must be an odd integer >= 3");
}

void GridFunction::validate() const {
    grid.validate();
    if (values.size() != static_cast<size_t>(grid.node_count))
        throw domain_error("GridFunction: value count does not match the grid");
}

GridFunction sample_profile(const Grid& grid, const SolitonParams& params) {
    grid.validate();
    params.validate();
    GridFunction fn;
    fn.grid = grid;
    fn.values.resize(grid.node_count);
    for (int j = 0; j < grid.node_count; ++j)
        fn.values[j] = profile_value(params, grid.node(j));
    return fn;
}

namespace {

// Composite Simpson over `cells` uniform cells starting at `begin`; an odd
// cell count ends with the 3/8 rule, a single cell falls back to trapezoid.
double simpson_cells(const std::vector<double>& g, int begin, int cells, double h) {
    if (cells <= 0)
        return 0.0;
    if (cells == 1)
        return 0.5 * h * (g[begin] + g[begin + 1]);
    double sum = 0.0;
    int simpson_cells_count = cells % 2 == 0 ? cells : cells - 3;
    for (int k = 0; k + 2 <= simpson_cells_count; k += 2)
        sum += h / 3.0 * (g[begin + k] + 4.0 * g[begin + k + 1] + g[begin + k + 2]);
    if (cells % 2 != 0) {
        const int b = begin + simpson_cells_count;
        sum += 3.0 * h / 8.0 * (g[b] + 3.0 * g[b + 1] + 3.0 * g[b + 2] + g[b + 3]);
    }
    return sum;
}

} // namespace

FunctionalValues functionals(const Grid& grid, const std::vector<std::complex<double>>& values,
                             double p, double gamma, double omega) {
    grid.validate();
    if (values.size() != static_cast<size_t>(grid.node_count))
        throw domain_error("functionals: value count does not match the grid");
    const int n = grid.node_count;
    const int c = grid.center();
    const double h = grid.step();
    const double lp_expo = (p + 1.0) / 2.0;

    double mass = 0.0, grad = 0.0;
    std::vector<double> gp(n);
    for (int j = 0; j < n; ++j) {
        const double nrm = std::norm(values[j]);
        mass += (j == 0 || j == n - 1) ? 0.5 * nrm : nrm;
        gp[j] = std::pow(nrm, lp_expo);
        if (j + 1 < n)
            grad += std::norm(values[j + 1] - values[j]);
    }
    mass *= h;
    grad /= h;
    const double lp = simpson_cells(gp, 0, c, h) + simpson_cells(gp, c, n - 1 - c, h);

    FunctionalValues f;
    f.mass = mass;
    f.lp = lp;
    f.grad_sq = grad;
    f.boundary_sq = std::norm(values[c]);
    const double alpha = (p - 1.0) / 2.0;
    f.energy = 0.5 * grad - 0.5 * gamma * f.boundary_sq - lp / (p + 1.0);
    f.action_omega = f.energy + 0.5 * omega * mass;
    f.nehari_omega = grad + omega * mass - gamma * f.boundary_sq - lp;
    f.virial_P = grad - 0.5 * gamma * f.boundary_sq - alpha * lp / (p + 1.0);
    return f;
}

FunctionalValues functionals(const GridFunction& v, double p, double gamma, double omega) {
    v.validate();
    return functionals(v.grid, v.values, p, gamma, omega);
}

ScaledFunction scale(const GridFunction& v, double lambda) {
    v.validate();
    if (!(lambda > 0.0))
        throw domain_error("scale: lambda must be positive");

    ScaledFunction out;
    out.fn.grid = v.grid;
    const int n = v.grid.node_count;

    if (lambda == 1.0) {
        out.fn.values = v.values;
        return out;
    }

    const double L = v.grid.half_width;
    const double h = v.grid.step();
    const double amp = std::sqrt(lambda);
    out.fn.values.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double y = lambda * v.grid.node(i);
        if (std::abs(y) > L)
            continue;
        double pos = y / h + v.grid.center();
        int j0 = static_cast<int>(std::floor(pos)) - 1;
        j0 = std::clamp(j0, 0, n - 4);
        const double s = pos - j0;
        // 4-point Lagrange weights at local coordinate s in [0, 3]
        const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        out.fn.values[i] = amp * (w0 * v.values[j0] + w1 * v.values[j0 + 1]
                                  + w2 * v.values[j0 + 2] + w3 * v.values[j0 + 3]);
    }

    if (lambda < 1.0) {
        // Mass the continuum scaling would place outside [-L, L] comes from
        // the part of v beyond [-lambda L, lambda L].
        const double cutoff = lambda * L;
        double outside = 0.0, total = 0.0;
        for (int j = 0; j < n; ++j) {
            const double nrm = std::norm(v.values[j]);
            total += nrm;
            if (std::abs(v.grid.node(j)) > cutoff)
                outside += nrm;
        }
        if (total > 0.0) {
            out.mass_outside_rel = outside / total;
            out.mass_leak_warning = out.mass_outside_rel > 1e-8;
        }
    }
    return out;
}

double LambdaLandscape::energy_at(double lambda) const {
    return a * lambda * lambda - b * lambda - c * std::pow(lambda, alpha);
}

double LambdaLandscape::energy_slope_at(double lambda) const {
    return 2.0 * a * lambda - b - c * alpha * std::pow(lambda, alpha - 1.0);
}

namespace {

// Bisection for a decreasing-at-hi sign change: f(lo) and f(hi) must have
// the given signs already.
template <class F>
double bisect(F&& f, double lo, double hi, bool positive_at_lo) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool pos = f(mid) > 0.0;
        if (pos == positive_at_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

LambdaLandscape lambda_landscape(const GridFunction& v, double p, double gamma) {
    if (!(p > 5.0))
        throw domain_error("lambda_landscape: requires p > 5 (alpha > 2)");
    if (!(gamma > 0.0))
        throw domain_error("lambda_landscape: requires gamma > 0");

    const FunctionalValues f = functionals(v, p, gamma, 0.0);
    LambdaLandscape ls;
    ls.alpha = (p - 1.0) / 2.0;
    ls.a = 0.5 * f.grad_sq;
    ls.b = 0.5 * gamma * f.boundary_sq;
    ls.c = f.lp / (p + 1.0);
    const double energy = ls.a - ls.b - ls.c;
    if (!(energy > 0.0))
        throw numeric_error("no_landscape: E(v) is not positive");
    if (!(ls.b > 0.0))
        throw numeric_error("no_landscape: the defect term vanishes");
    if (!(ls.c > 0.0))
        throw numeric_error("no_landscape: the nonlinear term vanishes");

    // The slope 2 a l - b - c alpha l^(alpha-1) is concave-after-convex with
    // a single interior maximum; its two roots bracket the slope maximum.
    const double slope_peak =
        std::pow(2.0 * ls.a / (ls.c * ls.alpha * (ls.alpha - 1.0)), 1.0 / (ls.alpha - 2.0));
    if (!(ls.energy_slope_at(slope_peak) > 0.0))
        throw numeric_error("no_landscape: slope never becomes positive");

    auto slope = [&](double l) { return ls.energy_slope_at(l); };
    auto value = [&](double l) { return ls.energy_at(l); };

    double lo = slope_peak;
    for (int i = 0; i < 2000 && slope(lo) > 0.0; ++i)
        lo *= 0.5;
    if (slope(lo) > 0.0)
        throw numeric_error("lambda_landscape: failed to bracket lambda1");
    ls.lambda1 = bisect(slope, lo, slope_peak, false);

    double hi = slope_peak;
    for (int i = 0; i < 2000 && slope(hi) > 0.0; ++i)
        hi *= 2.0;
    if (slope(hi) > 0.0)
        throw numeric_error("lambda_landscape: failed to bracket lambda3");
    ls.lambda3 = bisect(slope, slope_peak, hi, true);

    if (!(value(ls.lambda3) > 0.0))
        throw numeric_error("lambda_landscape: maximum energy not positive");

    lo = ls.lambda3;
    for (int i = 0; i < 2000 && value(lo) > 0.0; ++i)
        lo *= 0.5;
    if (value(lo) > 0.0)
        throw numeric_error("lambda_landscape: failed to bracket lambda2");
    ls.lambda2 = bisect(value, lo, ls.lambda3, false);

    hi = ls.lambda3;
    for (int i = 0; i < 2000 && value(hi) > 0.0; ++i)
        hi *= 2.0;
    if (value(hi) > 0.0)
        throw numeric_error("lambda_landscape: failed to bracket lambda4");
    ls.lambda4 = bisect(value, ls.lambda3, hi, true);

    if (!(ls.lambda1 < ls.lambda2 && ls.lambda2 < ls.lambda3 && ls.lambda3 < ls.lambda4))
        throw numeric_error("lambda_landscape: landmarks are not strictly ordered");
    return ls;
}

MembershipReport membership_B(const GridFunction& v, const SolitonParams& params,
                              const MembershipTolerances& tol) {
    params.validate();
    const double energy_phi = energy_closed_form(params);
    if (!(energy_phi > 0.0))
        throw numeric_error("undefined_set: the standing wave has nonpositive energy");

    const FunctionalValues f = functionals(v, params.p, params.gamma, params.omega);
    MembershipReport rep;
    rep.energy = f.energy;
    rep.energy_phi = energy_phi;
    rep.mass = f.mass;
    rep.mass_phi = mass_closed_form(params);
    rep.virial_P = f.virial_P;
    rep.nehari_K = f.nehari_omega;

    rep.energy_window = f.energy > tol.margin && f.energy < energy_phi - tol.margin;
    rep.mass_match = std::abs(f.mass - rep.mass_phi) <= tol.mass_rel * rep.mass_phi;
    rep.virial_negative = f.virial_P < -tol.margin;
    rep.nehari_negative = f.nehari_omega < -tol.margin;
    rep.member = rep.energy_window && rep.mass_match && rep.virial_negative
                 && rep.nehari_negative;
    return rep;
}

double ep_gap(const GridFunction& v, const SolitonParams& params,
              const MembershipTolerances& tol) {
    const MembershipReport rep = membership_B(v, params, tol);
    if (!rep.member)
        throw domain_error("ep_gap: v is not a member of the blowup set");
    return rep.energy - rep.virial_P - rep.energy_phi;
}

double nehari_scale(const GridFunction& v, double p, double gamma, double omega) {
    const FunctionalValues f = functionals(v, p, gamma, omega);
    const double quad = f.grad_sq + omega * f.mass - gamma * f.boundary_sq;
    if (!(quad > 0.0) || !(f.lp > 0.0))
        throw numeric_error("nehari_scale: no rescaling onto the Nehari manifold exists");
    return std::pow(quad / f.lp, 1.0 / (p - 1.0));
}

void write_grid_csv(std::ostream& out, const GridFunction& v) {
    v.validate();
    out << "x,re,im\n";
    for (int j = 0; j < v.grid.node_count; ++j)
        out << g15(v.grid.node(j)) << ',' << g15(v.values[j].real()) << ','
            << g15(v.values[j].imag()) << '\n';
}

GridFunction read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw domain_error("grid csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "x,re,im")
        throw domain_error("grid csv: expected header x,re,im");

    std::vector<double> xs;
    std::vector<std::complex<double>> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field;
        double parts[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, field, ','))
                throw domain_error("grid csv: row with fewer than 3 fields");
            size_t used = 0;
            parts[k] = std::stod(field, &used);
            if (used != field.size())
                throw domain_error("grid csv: malformed number '" + field + "'");
        }
        xs.push_back(parts[0]);
        values.emplace_back(parts[1], parts[2]);
    }

    const int n = static_cast<int>(xs.size());
    if (n < 3 || n % 2 == 0)
        throw domain_error("grid csv: node count must be an odd integer >= 3");
    GridFunction fn;
    fn.grid.half_width = 0.5 * (xs.back() - xs.front());
    fn.grid.node_count = n;
    fn.grid.validate();
    const double tol = 1e-9 * std::max(1.0, fn.grid.half_width);
    if (std::abs(xs.front() + xs.back()) > tol)
        throw domain_error("grid csv: grid is not symmetric about 0");
    for (int j = 0; j < n; ++j)
        if (std::abs(xs[j] - fn.grid.node(j)) > tol)
            throw domain_error("grid csv: nodes are not uniformly spaced");
    fn.values = std::move(values);
    return fn;
}

} // namespace dnls
