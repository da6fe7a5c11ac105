#include "plate/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plate/errors.hpp"
#include "plate/symbols.hpp"

namespace plate {

double NormParams::p_prime() const {
    if (!(p >= 1.0)) throw ConfigError("norms: p must be >= 1");
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return INFINITY;
    return p / (p - 1.0);
}

double NormParams::alpha1() const { return (n + 2.0 * (theta - 1.0)) / 2.0; }

double NormParams::alpha() const {
    if (!(lambda > 1.0)) throw ConfigError("norms: lambda must be > 1");
    return (2.0 - theta - lebesgue_gap()) / (lambda - 1.0);
}

double NormParams::beta() const { return alpha() + 1.0 - theta; }

double NormParams::lebesgue_gap() const {
    return (n / 2.0) * (1.0 - 2.0 / p);
}

double lp_norm(const Field& f, double p) {
    if (!f.grid) throw ConfigError("lp_norm: field has no grid");
    if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1, got " + std::to_string(p));
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.v) m = std::max(m, std::abs(v));
        return m;
    }
    const int n = f.grid->dim();
    double w = 1.0;
    for (int a = 0; a < n; ++a) w *= f.grid->dx();
    double acc = 0.0;
    for (double v : f.v) acc += std::pow(std::abs(v), p);
    return std::pow(w * acc, 1.0 / p);
}

double sobolev_norm(const Spectrum& fhat, double s) {
    if (!fhat.grid) throw ConfigError("sobolev_norm: spectrum has no grid");
    const auto& xs = fhat.grid->xi_sq();
    const int n = fhat.grid->dim();
    double w = 1.0;
    for (int a = 0; a < n; ++a) w *= fhat.grid->dxi();
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        acc += std::pow(1.0 + xs[i], s) * std::norm(fhat.c[i]);
    return std::sqrt(w * acc);
}

double sobolev_norm(const Field& f, double s) {
    if (!f.grid) throw ConfigError("sobolev_norm: field has no grid");
    return sobolev_norm(f.grid->forward(f), s);
}

// The imaginary-residue guard fires when the absolute imaginary part of the
// inverse transform exceeds 1e-12 of max(result amplitude, guard_scale).
// With guard_scale = 0 the test is purely relative; a positive guard_scale
// lets callers whose spectra are tiny *differences* of large trajectories
// (so their own amplitude is roundoff-dominated) anchor the guard to the
// scale the roundoff actually came from.
bool symmetry_broken(double residue, double max_re, double guard_scale) {
    const double max_im = residue * std::max(max_re, 1e-300);
    return max_im > 1e-12 * std::max({max_re, guard_scale, 1e-300});
}

double bessel_norm(const Spectrum& fhat, double s, double p, double guard_scale) {
    if (!fhat.grid) throw ConfigError("bessel_norm: spectrum has no grid");
    if (p == 2.0) return sobolev_norm(fhat, s);
    const SpectralGrid& g = *fhat.grid;
    const auto& xs = g.xi_sq();
    Spectrum weighted = g.make_spectrum();
    for (std::size_t i = 0; i < xs.size(); ++i)
        weighted.c[i] = std::pow(1.0 + xs[i], s / 2.0) * fhat.c[i];
    double residue = 0.0;
    Field out = g.inverse(weighted, &residue);
    if (symmetry_broken(residue, lp_norm(out, INFINITY), guard_scale))
        throw NumericalError("bessel_norm: imaginary residue exceeds 1e-12");
    return lp_norm(out, p);
}

double bessel_norm(const Field& f, double s, double p) {
    if (!f.grid) throw ConfigError("bessel_norm: field has no grid");
    if (p == 2.0) return sobolev_norm(f, s);
    return bessel_norm(f.grid->forward(f), s, p);
}

NormRecord record_norms(const Spectrum& uh, const Spectrum& uth, double t,
                        const NormParams& params, double guard_scale) {
    if (!uh.grid || uh.grid != uth.grid)
        throw ConfigError("record_norms: u and u_t must share one grid");
    const SpectralGrid& g = *uh.grid;
    NormRecord r;
    r.t = t;
    double residue = 0.0;
    Field u = g.inverse(uh, &residue);
    r.linf = lp_norm(u, INFINITY);
    if (symmetry_broken(residue, r.linf, guard_scale))
        throw NumericalError("record_norms: imaginary residue exceeds 1e-12");
    r.hs_u = sobolev_norm(uh, params.s);
    r.hs1_ut = sobolev_norm(uth, params.s - 1.0);
    r.hsp_u = bessel_norm(uh, params.s, params.p, guard_scale);
    r.hsp1_ut = bessel_norm(uth, params.s - 1.0, params.p, guard_scale);
    r.l2_u = sobolev_norm(uh, 0.0);
    return r;
}

double y_norm(std::span<const NormRecord> records, const NormParams& params) {
    const double a1 = params.alpha1();
    double sup = 0.0;
    for (const auto& r : records)
        sup = std::max(sup, std::pow(1.0 + r.t, a1) * r.linf + r.hs_u + r.hs1_ut);
    return sup;
}

double x_norm(std::span<const NormRecord> records, const NormParams& params) {
    const double a = params.alpha();
    const double b = params.beta();
    double sup = 0.0;
    for (const auto& r : records) {
        if (!(r.t > 0.0)) continue;
        sup = std::max(sup, std::pow(r.t, a) * r.hsp_u + std::pow(r.t, b) * r.hsp1_ut);
    }
    return sup;
}

double z_norm(std::span<const NormRecord> records, const NormParams& params) {
    const double gap = params.lebesgue_gap();
    double sup = 0.0;
    for (const auto& r : records) {
        if (!(r.t > 0.0) || !(r.t < params.T)) continue;
        sup = std::max(sup, std::pow(r.t, gap) * (r.hsp_u + r.hsp1_ut));
    }
    return sup;
}

double data_norm_I0(const Field& u0, const Field& u1,
                    const std::vector<double>& t_grid, const NormParams& params) {
    if (!u0.grid || u0.grid != u1.grid)
        throw ConfigError("data_norm_I0: u0 and u1 must share one grid");
    const SpectralGrid& g = *u0.grid;
    Spectrum u0h = g.forward(u0);
    Spectrum u1h = g.forward(u1);

    const double a = params.alpha();
    const double b = params.beta();
    double sup_a = 0.0, sup_b = 0.0;
    Spectrum tmp = g.make_spectrum();
    for (double t : t_grid) {
        if (!(t > 0.0)) continue;
        auto m1 = multiplier_array(MultiplierKind::dtS, g, t);
        auto m2 = multiplier_array(MultiplierKind::SLap, g, t);
        auto m3 = multiplier_array(MultiplierKind::dt2S, g, t);
        auto m4 = multiplier_array(MultiplierKind::dtSLap, g, t);

        double va = 0.0, vb = 0.0;
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = m1[i] * u0h.c[i];
        va += bessel_norm(tmp, params.s, params.p);
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = m2[i] * u1h.c[i];
        va += bessel_norm(tmp, params.s, params.p);
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = m3[i] * u0h.c[i];
        vb += bessel_norm(tmp, params.s - 1.0, params.p);
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = m4[i] * u1h.c[i];
        vb += bessel_norm(tmp, params.s - 1.0, params.p);

        sup_a = std::max(sup_a, std::pow(t, a) * va);
        sup_b = std::max(sup_b, std::pow(t, b) * vb);
    }
    return sup_a + sup_b;
}

std::vector<double> log_spaced(double t_lo, double t_hi, int per_decade) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw ConfigError("log_spaced: need 0 < t_lo < t_hi");
    if (per_decade < 1) throw ConfigError("log_spaced: per_decade must be >= 1");
    double lo = std::log10(t_lo), hi = std::log10(t_hi);
    int count = std::max(2, static_cast<int>(std::ceil((hi - lo) * per_decade)) + 1);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = std::pow(10.0, lo + (hi - lo) * i / (count - 1));
    out.front() = t_lo;
    out.back() = t_hi;
    return out;
}

} // namespace plate
