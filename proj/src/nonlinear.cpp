#include "plate/nonlinear.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include "plate/errors.hpp"

namespace plate {

namespace {

// Grids for zero-pad evaluation, shared across calls.  Keyed by
// (dimension, fine N, L); guarded because verification sweeps may call
// from several workers.
class FineGridRegistry {
public:
    const SpectralGrid& get(int n, int M, double L) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(n, M, L);
        auto it = grids_.find(key);
        if (it == grids_.end()) {
            it = grids_.emplace(key, std::make_unique<SpectralGrid>(n, M, L)).first;
        }
        return *it->second;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, double>, std::unique_ptr<SpectralGrid>> grids_;
};

FineGridRegistry& fine_grids() {
    static FineGridRegistry r;
    return r;
}

// Signed mode index along one axis for a 1-d index in FFTW order.
int mode_of(int i, int N) { return i < N / 2 ? i : i - N; }

// Flat index of a signed per-axis mode vector on a grid with N per axis.
std::size_t flat_of_modes(const std::vector<int>& j, int N, int n) {
    std::size_t flat = 0;
    for (int a = 0; a < n; ++a) {
        int i = j[a] >= 0 ? j[a] : j[a] + N;
        flat = flat * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
    }
    return flat;
}

Field pointwise_power(const Field& u, double lambda) {
    const SpectralGrid& g = *u.grid;
    Field out = g.make_field();
    for (std::size_t i = 0; i < u.v.size(); ++i)
        out.v[i] = std::pow(std::abs(u.v[i]), lambda);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        if (!std::isfinite(out.v[i])) {
            std::size_t worst = 0;
            double amax = 0.0;
            for (std::size_t m = 0; m < u.v.size(); ++m) {
                if (std::abs(u.v[m]) > amax) {
                    amax = std::abs(u.v[m]);
                    worst = m;
                }
            }
            std::ostringstream msg;
            msg << "power_nonlinearity: |u|^lambda overflowed; max |u| = " << amax
                << " at (";
            for (int a = 0; a < g.dim(); ++a)
                msg << (a ? ", " : "") << g.coord(worst, a);
            msg << ")";
            throw NumericalError(msg.str());
        }
    }
    return out;
}

Field real_multiplier(const Field& u, const std::vector<double>& m) {
    const SpectralGrid& g = *u.grid;
    Spectrum s = g.forward(u);
    for (std::size_t i = 0; i < s.c.size(); ++i) s.c[i] *= m[i];
    double residue = 0.0;
    Field out = g.inverse(s, &residue);
    if (residue > 1e-12)
        throw NumericalError("nonlinear: imaginary residue exceeds 1e-12");
    return out;
}

} // namespace

std::vector<std::string> NonlinearityParams::validate(int n) const {
    if (!(lambda >= 2.0))
        throw ConfigError("nonlinearity: lambda must be >= 2, got " +
                          std::to_string(lambda));
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ConfigError("nonlinearity: theta must lie in [0, 1], got " +
                          std::to_string(theta));
    if (!std::isfinite(delta))
        throw ConfigError("nonlinearity: delta must be finite");
    std::vector<std::string> warnings;
    if (theta <= (2.0 - n) / 2.0) {
        std::ostringstream w;
        w << "theta = " << theta << " is at or below (2-n)/2 = " << (2.0 - n) / 2.0
          << " in dimension " << n << "; sup-norm decay rates degenerate there";
        warnings.push_back(w.str());
    }
    return warnings;
}

void dealias_spectrum(Spectrum& s, Dealias rule) {
    if (rule != Dealias::two_thirds) return;
    const SpectralGrid& g = *s.grid;
    const int N = g.points_per_axis();
    const int cutoff = N / 3;
    for (std::size_t flat = 0; flat < s.c.size(); ++flat) {
        std::size_t rem = flat;
        bool kill = false;
        for (int a = 0; a < g.dim(); ++a) {
            int i = static_cast<int>(rem % static_cast<std::size_t>(N));
            rem /= static_cast<std::size_t>(N);
            if (std::abs(mode_of(i, N)) > cutoff) kill = true;
        }
        if (kill) s.c[flat] = {0.0, 0.0};
    }
}

Field power_nonlinearity(const Field& u, double lambda, Dealias dealias) {
    if (!u.grid) throw ConfigError("power_nonlinearity: field has no grid");
    if (!(lambda >= 1.0))
        throw ConfigError("power_nonlinearity: lambda must be >= 1");
    const SpectralGrid& g = *u.grid;

    if (dealias == Dealias::none) return pointwise_power(u, lambda);

    if (dealias == Dealias::two_thirds) {
        Field raw = pointwise_power(u, lambda);
        Spectrum s = g.forward(raw);
        dealias_spectrum(s, dealias);
        double residue = 0.0;
        Field out = g.inverse(s, &residue);
        if (residue > 1e-12)
            throw NumericalError("power_nonlinearity: imaginary residue exceeds 1e-12");
        return out;
    }

    // zero_pad: evaluate the power on a grid refined by 3/2, truncate back.
    const int n = g.dim();
    const int N = g.points_per_axis();
    const int M = 2 * ((3 * N + 3) / 4); // even, >= 3N/2
    const SpectralGrid& fine = fine_grids().get(n, M, g.half_length());

    Spectrum coarse = g.forward(u);
    Spectrum embedded = fine.make_spectrum();
    // Shared frequency spacing (same L) means mode j carries the same
    // continuum frequency on both grids; copy coefficients directly.
    std::vector<int> j(n, -N / 2);
    for (;;) {
        std::size_t cf = flat_of_modes(j, N, n);
        std::size_t ff = flat_of_modes(j, M, n);
        embedded.c[ff] = coarse.c[cf];
        int axis = n - 1;
        while (axis >= 0) {
            if (++j[axis] < N / 2) break;
            j[axis] = -N / 2;
            --axis;
        }
        if (axis < 0) break;
    }

    double residue = 0.0;
    Field u_fine = fine.inverse(embedded, &residue);
    if (residue > 1e-12)
        throw NumericalError("power_nonlinearity: imaginary residue exceeds 1e-12");
    Field p_fine = pointwise_power(u_fine, lambda);
    Spectrum s_fine = fine.forward(p_fine);

    Spectrum truncated = g.make_spectrum();
    std::vector<int> jj(n, -N / 2);
    for (;;) {
        std::size_t cf = flat_of_modes(jj, N, n);
        std::size_t ff = flat_of_modes(jj, M, n);
        truncated.c[cf] = s_fine.c[ff];
        int axis = n - 1;
        while (axis >= 0) {
            if (++jj[axis] < N / 2) break;
            jj[axis] = -N / 2;
            --axis;
        }
        if (axis < 0) break;
    }
    Field out = g.inverse(truncated, &residue);
    if (residue > 1e-12)
        throw NumericalError("power_nonlinearity: imaginary residue exceeds 1e-12");
    return out;
}

Field frac_laplacian(const Field& u, double theta) {
    if (!u.grid) throw ConfigError("frac_laplacian: field has no grid");
    if (!(theta >= 0.0))
        throw ConfigError("frac_laplacian: theta must be >= 0");
    const auto& xs = u.grid->xi_sq();
    std::vector<double> m(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0)
            m[i] = theta == 0.0 ? 1.0 : 0.0;
        else
            m[i] = std::pow(xs[i], theta);
    }
    return real_multiplier(u, m);
}

Field bessel_inverse(const Field& u) {
    if (!u.grid) throw ConfigError("bessel_inverse: field has no grid");
    const auto& xs = u.grid->xi_sq();
    std::vector<double> m(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) m[i] = 1.0 / (1.0 + xs[i]);
    return real_multiplier(u, m);
}

} // namespace plate
