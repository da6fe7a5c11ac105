#include "plate/propagator.hpp"

#include <cmath>
#include <string>

#include "plate/errors.hpp"

namespace plate {

namespace {

Field multiply_and_invert(const Spectrum& fhat, const std::vector<double>& m) {
    const SpectralGrid& g = *fhat.grid;
    Spectrum prod = g.make_spectrum();
    for (std::size_t i = 0; i < prod.c.size(); ++i) prod.c[i] = m[i] * fhat.c[i];
    double residue = 0.0;
    Field out = g.inverse(prod, &residue);
    if (residue > 1e-12)
        throw NumericalError(
            "apply: imaginary residue " + std::to_string(residue) +
            " exceeds 1e-12 of amplitude (Hermitian symmetry corrupted)");
    return out;
}

} // namespace

Field apply(MultiplierKind kind, const Spectrum& fhat, double t, double theta) {
    if (!fhat.grid) throw ConfigError("apply: spectrum has no grid");
    auto m = multiplier_array(kind, *fhat.grid, t, theta);
    return multiply_and_invert(fhat, m);
}

Field apply(MultiplierKind kind, const Field& f, double t, double theta) {
    if (!f.grid) throw ConfigError("apply: field has no grid");
    Spectrum fhat = f.grid->forward(f);
    return apply(kind, fhat, t, theta);
}

LinearState linear_solution(const Field& u0, const Field& u1, double t,
                            Convention conv) {
    if (!u0.grid || u0.grid != u1.grid)
        throw ConfigError("linear_solution: u0 and u1 must share one grid");
    const SpectralGrid& g = *u0.grid;

    Spectrum u0h = g.forward(u0);
    Spectrum u1h = g.forward(u1);

    auto m_u = multiplier_array(u0_kind(conv), g, t);
    auto m_ut = multiplier_array(u0_dt_kind(conv), g, t);
    auto m_slap = multiplier_array(MultiplierKind::SLap, g, t);
    auto m_dtslap = multiplier_array(MultiplierKind::dtSLap, g, t);

    Spectrum uh = g.make_spectrum();
    Spectrum uth = g.make_spectrum();
    for (std::size_t i = 0; i < uh.c.size(); ++i) {
        uh.c[i] = m_u[i] * u0h.c[i] + m_slap[i] * u1h.c[i];
        uth.c[i] = m_ut[i] * u0h.c[i] + m_dtslap[i] * u1h.c[i];
    }

    LinearState out;
    out.t = t;
    double r1 = 0.0, r2 = 0.0;
    out.u = g.inverse(uh, &r1);
    out.ut = g.inverse(uth, &r2);
    if (r1 > 1e-12 || r2 > 1e-12)
        throw NumericalError("linear_solution: imaginary residue exceeds 1e-12");
    return out;
}

} // namespace plate
