#include "dnls/soliton.hpp"

#include <cmath>

#include "dnls/errors.hpp"

namespace dnls {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

double log_sech(double z) {
    // log(1/cosh z), stable for large z
    return kLn2 - z - std::log1p(std::exp(-2.0 * z));
}

// log of the amplitude factor (p+1) omega / 2
double log_amplitude(const SolitonParams& params) {
    return std::log((params.p + 1.0) * params.omega / 2.0);
}

} // namespace

double SolitonParams::xi() const {
    return gamma / (2.0 * std::sqrt(omega));
}

double SolitonParams::alpha() const {
    return (p - 1.0) / 2.0;
}

bool SolitonParams::near_threshold() const {
    return 1.0 - xi() < 1e-6;
}

void SolitonParams::validate() const {
    if (!(p > 1.0))
        throw domain_error("SolitonParams: p must exceed 1");
    if (!(gamma > 0.0))
        throw domain_error("SolitonParams: gamma must be positive");
    if (!(omega > gamma * gamma / 4.0))
        throw domain_error("SolitonParams: omega must exceed gamma^2/4");
}

double profile_value(const SolitonParams& params, double x) {
    params.validate();
    const double k = (params.p - 1.0) * std::sqrt(params.omega) / 2.0;
    const double z = k * std::abs(x) + std::atanh(params.xi());
    const double log_phi = (log_amplitude(params) + 2.0 * log_sech(z)) / (params.p - 1.0);
    return std::exp(log_phi);
}

double boundary_value_sq(const SolitonParams& params) {
    params.validate();
    const double xi = params.xi();
    const double one_minus_xi_sq = (1.0 - xi) * (1.0 + xi);
    return std::exp(2.0 / (params.p - 1.0) * (log_amplitude(params) + std::log(one_minus_xi_sq)));
}

double mass_closed_form(const SolitonParams& params) {
    params.validate();
    const double expo = 2.0 / (params.p - 1.0);
    const double j = incomplete_profile_integral(params.xi(), expo - 1.0);
    if (j == 0.0)
        return 0.0;
    const double log_mass = std::log(4.0 / (params.p - 1.0)) - 0.5 * std::log(params.omega)
                            + expo * log_amplitude(params) + std::log(j);
    return std::exp(log_mass);
}

double lp_norm_closed_form(const SolitonParams& params) {
    params.validate();
    const double expo = 2.0 / (params.p - 1.0);
    const double j = incomplete_profile_integral(params.xi(), expo);
    if (j == 0.0)
        return 0.0;
    const double log_lp = std::log(4.0 / (params.p - 1.0)) - 0.5 * std::log(params.omega)
                          + (1.0 + expo) * log_amplitude(params) + std::log(j);
    return std::exp(log_lp);
}

double grad_sq_closed_form(const SolitonParams& params) {
    return 0.5 * params.gamma * boundary_value_sq(params)
           + params.alpha() / (params.p + 1.0) * lp_norm_closed_form(params);
}

double energy_closed_form(const SolitonParams& params) {
    const double b = boundary_value_sq(params);
    const double l = lp_norm_closed_form(params);
    const double g = 0.5 * params.gamma * b + params.alpha() / (params.p + 1.0) * l;
    return 0.5 * g - 0.5 * params.gamma * b - l / (params.p + 1.0);
}

QuantityReport quantity_report(const SolitonParams& params) {
    params.validate();
    QuantityReport rep;
    rep.near_threshold_warning = params.near_threshold();
    rep.mass = mass_closed_form(params);
    rep.boundary_sq = boundary_value_sq(params);
    rep.lp_norm = lp_norm_closed_form(params);
    rep.grad_sq = 0.5 * params.gamma * rep.boundary_sq
                  + params.alpha() / (params.p + 1.0) * rep.lp_norm;
    rep.energy = 0.5 * rep.grad_sq - 0.5 * params.gamma * rep.boundary_sq
                 - rep.lp_norm / (params.p + 1.0);
    rep.action = rep.energy + 0.5 * params.omega * rep.mass;
    rep.nehari = rep.grad_sq + params.omega * rep.mass - params.gamma * rep.boundary_sq
                 - rep.lp_norm;

    if (rep.near_threshold_warning) {
        // Quadrature of the gradient is skipped this close to omega = gamma^2/4.
        rep.virial = 0.0;
        return rep;
    }

    // Independent gradient quadrature: |phi'(x)|^2 = omega phi(x)^2 tanh^2(z)
    // with z = k|x| + atanh(xi), decaying like exp(-2 sqrt(omega) x).
    const double sqrt_omega = std::sqrt(params.omega);
    const double k = (params.p - 1.0) * sqrt_omega / 2.0;
    const double z0 = std::atanh(params.xi());
    const double expo = 2.0 / (params.p - 1.0);
    const double log_amp = log_amplitude(params);
    const double x_end = (50.0 + std::max(0.0, expo * (log_amp + 2.0 * kLn2)))
                         / (2.0 * sqrt_omega);
    auto integrand = [&](double x) {
        const double z = k * x + z0;
        const double phi_sq = std::exp(expo * (log_amp + 2.0 * log_sech(z)));
        const double th = std::tanh(z);
        return params.omega * phi_sq * th * th;
    };
    const double grad_quad = 2.0 * tanh_sinh(integrand, x_end).value;
    rep.virial = grad_quad - 0.5 * params.gamma * rep.boundary_sq
                 - params.alpha() / (params.p + 1.0) * rep.lp_norm;
    return rep;
}

int energy_sign(const SolitonParams& params) {
    params.validate();
    if (!(params.p > 5.0))
        throw domain_error("energy_sign: requires p > 5");
    const double xi = params.xi();
    const double expo = 2.0 / (params.p - 1.0);
    const double lhs = (params.p - 5.0) / (params.p - 1.0)
                       * incomplete_profile_integral(xi, expo);
    const double rhs = xi * std::pow((1.0 - xi) * (1.0 + xi), expo);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double r = lhs - rhs;
    if (std::abs(r) <= 1e-11 * scale)
        return 0;
    return r > 0.0 ? 1 : -1;
}

} // namespace dnls
