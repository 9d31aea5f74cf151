#include "dnls/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dnls/errors.hpp"

namespace dnls {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfPi = kPi / 2.0;

// Node of the tanh-sinh map at abscissa t, expressed as the offset from the
// nearer endpoint of (0, length) together with its weight. The offset from
// the left endpoint is length / (1 + exp(2 w)) with w = (pi/2) sinh t, which
// stays accurate down to the underflow limit.
struct DeNode {
    double offset_left;   // distance from 0
    double offset_right;  // distance from length
    double weight;
};

bool de_node(double t, double length, DeNode& node) {
    const double w = kHalfPi * std::sinh(t);
    if (std::abs(w) > 350.0)
        return false;  // complement underflows; contribution is below 1e-300
    const double e2w = std::exp(2.0 * w);
    node.offset_left = length / (1.0 + 1.0 / e2w);
    node.offset_right = length / (1.0 + e2w);
    const double sech_w = 1.0 / std::cosh(w);
    node.weight = 0.5 * length * kHalfPi * std::cosh(t) * sech_w * sech_w;
    return true;
}

} // namespace

QuadratureResult tanh_sinh(const std::function<double(double)>& f, double length,
                           double target_abs, int max_levels) {
    QuadratureResult res;
    if (length == 0.0)
        return res;
    if (!(length > 0.0))
        throw domain_error("tanh_sinh: interval length must be nonnegative");

    const double eps = std::numeric_limits<double>::epsilon();
    const double t_max = 7.0;
    const double h0 = 0.5;

    // Evaluates f at the node for abscissa t, picking whichever endpoint
    // offset is exact; for t < 0 the node is near 0, the singular end.
    auto eval = [&](double t, double& abssum) -> double {
        DeNode nd;
        if (!de_node(t, length, nd))
            return 0.0;
        const double u = (t < 0.0) ? nd.offset_left : length - nd.offset_right;
        if (u <= 0.0 || u >= length)
            return 0.0;
        const double g = f(u) * nd.weight;
        if (!std::isfinite(g))
            throw numeric_error("tanh_sinh: integrand not finite at offset " + std::to_string(u));
        abssum += std::abs(g);
        return g;
    };

    double abssum = 0.0;
    double sum = eval(0.0, abssum);
    for (int k = 1; k * h0 <= t_max; ++k) {
        sum += eval(k * h0, abssum);
        sum += eval(-k * h0, abssum);
    }
    double value = sum * h0;
    double prev = value;
    res.levels = 0;

    for (int level = 1; level <= max_levels; ++level) {
        const double h = h0 / double(1 << level);
        double add = 0.0;
        for (int k = 1; k * h <= t_max; k += 2) {
            add += eval(k * h, abssum);
            add += eval(-k * h, abssum);
        }
        prev = value;
        value = 0.5 * value + add * h;
        res.levels = level;
        const double diff = std::abs(value - prev);
        const double floor = 8.0 * eps * abssum * h;
        if (diff <= std::max(target_abs, floor))
            break;
    }

    res.value = value;
    res.error = std::max(std::abs(value - prev), 2.0 * eps * std::abs(value));
    return res;
}

QuadratureResult incomplete_profile_integral_full(double xi, double beta) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw domain_error("incomplete_profile_integral: xi must lie in [0, 1]");
    if (!(beta > -1.0 + 1e-9))
        throw domain_error("incomplete_profile_integral: beta must exceed -1 + 1e-9");
    if (xi == 1.0)
        return {0.0, 0.0, 0};

    // s = sin(theta), then theta = pi/2 - delta: the integrand becomes
    // sin(delta)^(2 beta + 1) on (0, acos(xi)), singular only at delta = 0.
    const double length = std::acos(xi);
    const double expo = 2.0 * beta + 1.0;
    auto f = [expo](double delta) { return std::pow(std::sin(delta), expo); };
    return tanh_sinh(f, length);
}

double incomplete_profile_integral(double xi, double beta) {
    return incomplete_profile_integral_full(xi, beta).value;
}

QuadratureResult sech_power_tail_integral_full(double a, double beta) {
    if (!(a > 0.0 && a < 1.0))
        throw domain_error("sech_power_tail_integral: a must lie in (0, 1)");
    if (!(beta > 0.0))
        throw domain_error("sech_power_tail_integral: beta must be positive");

    const double y0 = std::atanh(a);
    // (sech^2 y)^beta <= (2 e^-y)^(2 beta); truncate where the analytic tail
    // bound drops below 1e-20-ish and fold the bound into the error estimate.
    const double ln2 = 0.6931471805599453;
    const double y_end = (46.0 + 2.0 * beta * ln2 - std::log(2.0 * beta)) / (2.0 * beta);
    const double length = std::max(5.0, y_end - y0);

    auto log_cosh = [](double y) { return y + std::log1p(std::exp(-2.0 * y)) - 0.6931471805599453; };
    auto f = [&](double u) {
        const double y = y0 + u;
        return std::exp(-2.0 * beta * log_cosh(y));
    };
    QuadratureResult res = tanh_sinh(f, length);
    const double tail = std::exp(2.0 * beta * ln2 - 2.0 * beta * (y0 + length)) / (2.0 * beta);
    res.error += tail;
    return res;
}

double sech_power_tail_integral(double a, double beta) {
    return sech_power_tail_integral_full(a, beta).value;
}

} // namespace dnls
