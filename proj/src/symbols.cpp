#include "plate/symbols.hpp"

#include <cmath>
#include <string>

#include "plate/errors.hpp"

namespace plate {

namespace {

// sin(phi t)/phi with a Taylor branch for small phi*t.  Only this ratio
// needs special handling; every other 0/0 in the multiplier table is
// resolved exactly through a/phi = 1/sqrt(3+4x).
double sinc_phi(double phi, double t) {
    double pt = phi * t;
    if (std::abs(pt) < 1e-4) {
        // t - t^3 phi^2 / 6; relative error O((phi t)^4) <= 1e-16 here.
        return t - t * t * t * phi * phi / 6.0;
    }
    return std::sin(pt) / phi;
}

// |x|^theta with the xi = 0 convention: 0^0 = 1, 0^theta = 0 for theta > 0.
double pow_theta(double x, double theta) {
    if (x == 0.0) return theta == 0.0 ? 1.0 : 0.0;
    return std::pow(x, theta);
}

} // namespace

double symbol_decay(double xi_sq) {
    return xi_sq / (2.0 * (1.0 + xi_sq));
}

double symbol_oscillation(double xi_sq) {
    return xi_sq * std::sqrt(3.0 + 4.0 * xi_sq) / (2.0 * (1.0 + xi_sq));
}

MultiplierKind u0_kind(Convention c) {
    return c == Convention::paper ? MultiplierKind::dtS : MultiplierKind::P_ivp;
}

MultiplierKind u0_dt_kind(Convention c) {
    return c == Convention::paper ? MultiplierKind::dt2S : MultiplierKind::dtP_ivp;
}

double multiplier(MultiplierKind kind, double xi_sq, double t, double theta) {
    if (!(xi_sq >= 0.0))
        throw ConfigError("multiplier: xi_sq must be >= 0, got " + std::to_string(xi_sq));
    if (!(t >= 0.0))
        throw ConfigError("multiplier: t must be >= 0, got " + std::to_string(t));

    const double x = xi_sq;
    const double a = symbol_decay(x);
    const double phi = symbol_oscillation(x);
    const double E = std::exp(-a * t);
    const double s34 = std::sqrt(3.0 + 4.0 * x);
    const double pt = phi * t;

    switch (kind) {
    case MultiplierKind::S:
        return E * sinc_phi(phi, t);
    case MultiplierKind::dtS:
        // e^{-at} [cos(phi t) - (a/phi) sin(phi t)], with a/phi = 1/s34.
        return E * (std::cos(pt) - std::sin(pt) / s34);
    case MultiplierKind::dt2S: {
        // e^{-at} [-2a cos - ((phi^2 - a^2)/phi) sin]; the sine coefficient
        // simplifies exactly to x (1 + 2x) / ((1 + x) s34).
        double sin_coef = x * (1.0 + 2.0 * x) / ((1.0 + x) * s34);
        return E * (-2.0 * a * std::cos(pt) - sin_coef * std::sin(pt));
    }
    case MultiplierKind::SLap:
        return -x * multiplier(MultiplierKind::S, x, t);
    case MultiplierKind::dtSLap:
        return -x * multiplier(MultiplierKind::dtS, x, t);
    case MultiplierKind::LambdaTheta:
        return multiplier(MultiplierKind::S, x, t) * pow_theta(x, theta) / (1.0 + x);
    case MultiplierKind::dtLambdaTheta:
        return multiplier(MultiplierKind::dtS, x, t) * pow_theta(x, theta) / (1.0 + x);
    case MultiplierKind::P_ivp:
        return E * (std::cos(pt) + std::sin(pt) / s34);
    case MultiplierKind::dtP_ivp: {
        // d/dt P_ivp = -e^{-at} (phi + a^2/phi) sin(phi t); the coefficient
        // phi + a^2/phi = phi (1 + 1/(3+4x)) is regular down to xi = 0.
        double coef = phi * (1.0 + 1.0 / (3.0 + 4.0 * x));
        return -E * coef * std::sin(pt);
    }
    }
    throw ConfigError("multiplier: unknown kind");
}

std::vector<double> multiplier_array(MultiplierKind kind, const SpectralGrid& grid,
                                     double t, double theta) {
    const auto& xs = grid.xi_sq();
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = multiplier(kind, xs[i], t, theta);
    return out;
}

double max_oscillation(const SpectralGrid& grid) {
    return symbol_oscillation(grid.max_xi_sq());
}

} // namespace plate
