#include "dnls/thresholds.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "dnls/errors.hpp"
#include "dnls/format.hpp"

namespace dnls {

namespace {

struct ResidualSpec {
    double coefficient; // multiplies the integral term
    double exponent;    // beta of both the integral and the algebraic term
};

ResidualSpec residual_spec(ThresholdKind kind, double p) {
    const double e = 2.0 / (p - 1.0);
    switch (kind) {
    case ThresholdKind::Xi0:
        return {(p - 5.0) / (p - 1.0), e - 1.0};
    case ThresholdKind::Xi1:
        return {(p - 5.0) / (p - 1.0), e};
    case ThresholdKind::Xi2:
        return {(p - 5.0) / 2.0, e};
    }
    throw domain_error("threshold: unknown kind");
}

double algebraic_term(double xi, double beta) {
    return xi * std::pow((1.0 - xi) * (1.0 + xi), beta);
}

void require_supercritical(double p) {
    if (!(p > 5.0))
        throw domain_error("threshold: requires p > 5");
}

} // namespace

const char* threshold_name(ThresholdKind kind) {
    switch (kind) {
    case ThresholdKind::Xi0: return "xi0";
    case ThresholdKind::Xi1: return "xi1";
    case ThresholdKind::Xi2: return "xi2";
    }
    return "?";
}

double threshold_residual(ThresholdKind kind, double p, double xi) {
    require_supercritical(p);
    const ResidualSpec spec = residual_spec(kind, p);
    return spec.coefficient * incomplete_profile_integral(xi, spec.exponent)
           - algebraic_term(xi, spec.exponent);
}

double threshold_xi(ThresholdKind kind, double p) {
    require_supercritical(p);
    const ResidualSpec spec = residual_spec(kind, p);
    auto residual = [&](double xi) {
        return spec.coefficient * incomplete_profile_integral(xi, spec.exponent)
               - algebraic_term(xi, spec.exponent);
    };

    const double eps_b = 1e-10;
    double lo = eps_b, hi = 1.0 - eps_b;
    double r_lo = residual(lo), r_hi = residual(hi);
    if (!(r_lo > 0.0 && r_hi < 0.0))
        throw numeric_error(std::string("threshold ") + threshold_name(kind)
                            + ": no sign change across the bracket at p = " + g15(p));

    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double r_mid = residual(mid);
        if (r_mid > 0.0) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }

    // Secant polish inside the final bracket.
    double root = (r_lo - r_hi) != 0.0 ? lo + (hi - lo) * r_lo / (r_lo - r_hi)
                                       : 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double r = residual(root);
        if (r == 0.0)
            break;
        const double denom = (r > 0.0) ? (r - r_hi) : (r_lo - r);
        const double other = (r > 0.0) ? hi : lo;
        if (denom == 0.0)
            break;
        double next = root + (other - root) * r / denom;
        if (!(next > lo && next < hi))
            break;
        root = next;
    }

    const double lhs = spec.coefficient * incomplete_profile_integral(root, spec.exponent);
    const double rhs = algebraic_term(root, spec.exponent);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (std::abs(lhs - rhs) > 1e-12 * scale)
        throw numeric_error(std::string("threshold ") + threshold_name(kind)
                            + ": residual did not converge at p = " + g15(p));
    return root;
}

double omega_threshold(ThresholdKind kind, double p, double gamma) {
    if (!(gamma > 0.0))
        throw domain_error("omega_threshold: gamma must be positive");
    const double root = threshold_xi(kind, p);
    return gamma * gamma / (4.0 * root * root);
}

int threshold_sign_changes(ThresholdKind kind, double p, int samples) {
    require_supercritical(p);
    if (samples < 3)
        throw domain_error("threshold_sign_changes: need at least 3 samples");
    const ResidualSpec spec = residual_spec(kind, p);
    const double beta = spec.exponent;
    const double j_full = incomplete_profile_integral(0.0, beta);

    // Prefix integral of (1-s^2)^beta by per-panel Simpson; the panel touching
    // s = 1 (where the integrand can be singular) is never needed because the
    // scan stays strictly inside (0, 1).
    const double w = 1.0 / samples;
    auto f = [beta](double s) { return std::pow((1.0 - s) * (1.0 + s), beta); };
    double prefix = 0.0;
    int changes = 0;
    int last_sign = 0;
    for (int i = 1; i < samples; ++i) {
        const double a = (i - 1) * w, b = i * w;
        prefix += w / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        const double xi = b;
        const double r = spec.coefficient * (j_full - prefix) - algebraic_term(xi, beta);
        const int sign = (r > 0.0) - (r < 0.0);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign)
                ++changes;
            last_sign = sign;
        }
    }
    return changes;
}

const char* stability_label_name(StabilityLabel label) {
    switch (label) {
    case StabilityLabel::stable: return "stable";
    case StabilityLabel::orbitally_unstable: return "orbitally_unstable";
    case StabilityLabel::orbitally_unstable_conjectured_strong:
        return "orbitally_unstable_conjectured_strong";
    case StabilityLabel::strongly_unstable: return "strongly_unstable";
    }
    return "?";
}

RegimeClassification classify(const SolitonParams& params) {
    params.validate();
    RegimeClassification rc;
    rc.xi = params.xi();
    if (!(params.p > 5.0)) {
        rc.supercritical = false;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rc.xi0 = rc.xi1 = rc.xi2 = nan;
        rc.omega0 = rc.omega1 = rc.omega2 = nan;
        rc.label = StabilityLabel::stable;
        return rc;
    }

    rc.supercritical = true;
    rc.xi0 = threshold_xi(ThresholdKind::Xi0, params.p);
    rc.xi1 = threshold_xi(ThresholdKind::Xi1, params.p);
    rc.xi2 = threshold_xi(ThresholdKind::Xi2, params.p);
    const double g2 = params.gamma * params.gamma;
    rc.omega0 = g2 / (4.0 * rc.xi0 * rc.xi0);
    rc.omega1 = g2 / (4.0 * rc.xi1 * rc.xi1);
    rc.omega2 = g2 / (4.0 * rc.xi2 * rc.xi2);

    const double omega = params.omega;
    rc.mass_derivative_negative = omega > rc.omega0;
    rc.energy_positive = omega > rc.omega1;
    rc.slope_condition = omega > rc.omega2;

    if (omega < rc.omega0)
        rc.label = StabilityLabel::stable;
    else if (omega <= rc.omega2)
        rc.label = StabilityLabel::orbitally_unstable;
    else if (omega <= rc.omega1)
        rc.label = StabilityLabel::orbitally_unstable_conjectured_strong;
    else
        rc.label = StabilityLabel::strongly_unstable;
    return rc;
}

std::vector<SweepRow> sweep(double lo, double hi, int n) {
    if (!(lo > 5.0))
        throw domain_error("sweep: lower end must exceed 5");
    if (!(hi >= lo))
        throw domain_error("sweep: upper end must not be below the lower end");
    if (n < 2)
        throw domain_error("sweep: need at least 2 grid points");

    std::vector<SweepRow> rows;
    rows.reserve(n);
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        SweepRow row;
        row.p = (i == n - 1) ? hi : lo + i * step;
        try {
            row.xi0 = threshold_xi(ThresholdKind::Xi0, row.p);
            row.xi1 = threshold_xi(ThresholdKind::Xi1, row.p);
            row.xi2 = threshold_xi(ThresholdKind::Xi2, row.p);
        } catch (const std::exception& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.xi0 = row.xi1 = row.xi2 = nan;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "p,xi0,xi1,xi2\n";
    for (const SweepRow& row : rows)
        out << g15(row.p) << ',' << g15(row.xi0) << ',' << g15(row.xi1) << ','
            << g15(row.xi2) << '\n';
}

} // namespace dnls
