#include "plate/testfunctions.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "plate/errors.hpp"

namespace plate {

namespace {

double radius_sq(const SpectralGrid& g, std::size_t flat) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        double x = g.coord(flat, a);
        r2 += x * x;
    }
    return r2;
}

// Uniform in (0, 1] from the top 53 bits, then Box-Muller.  Written out
// (rather than std::normal_distribution) so the realization is identical
// across standard libraries for a given seed.
struct PortableGauss {
    std::mt19937_64 rng;
    explicit PortableGauss(std::uint64_t seed) : rng(seed) {}
    double uniform() {
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    }
    std::pair<double, double> pair() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * std::numbers::pi * u2),
                r * std::sin(2.0 * std::numbers::pi * u2)};
    }
};

} // namespace

Field gaussian(const SpectralGrid& grid, double amplitude, double width) {
    if (!(width > 0.0)) throw ConfigError("gaussian: width must be positive");
    Field f = grid.make_field();
    for (std::size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = amplitude * std::exp(-radius_sq(grid, i) / (2.0 * width * width));
    return f;
}

Field bump(const SpectralGrid& grid, double amplitude, double radius) {
    if (!(radius > 0.0)) throw ConfigError("bump: radius must be positive");
    Field f = grid.make_field();
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        double r2 = radius_sq(grid, i) / (radius * radius);
        f.v[i] = r2 < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    }
    return f;
}

Field random_band_limited(const SpectralGrid& grid, double k_max, std::uint64_t seed,
                          double amplitude) {
    if (!(k_max > 0.0)) throw ConfigError("random_band_limited: k_max must be positive");
    const int n = grid.dim();
    const int N = grid.points_per_axis();
    const double dxi = grid.dxi();
    // Largest integer mode magnitude inside the band; independent of N so a
    // fixed seed means a fixed continuum function under refinement.
    const double j_real = k_max / dxi;
    const int J = static_cast<int>(std::floor(j_real + 1e-12));
    if (J > N / 2 - 1)
        throw ConfigError("random_band_limited: band k_max = " + std::to_string(k_max) +
                          " is not resolved by N = " + std::to_string(N));

    Spectrum s = grid.make_spectrum();
    PortableGauss gauss(seed);

    auto flat_of = [&](const std::vector<int>& m) {
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) {
            int i = m[a] >= 0 ? m[a] : m[a] + N;
            flat = flat * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
        }
        return flat;
    };

    // Lexicographic walk over the integer box [-J, J]^n; draw one complex
    // coefficient per canonical mode (first nonzero component positive).
    std::vector<int> m(n, -J);
    for (;;) {
        long msq = 0;
        for (int a = 0; a < n; ++a) msq += static_cast<long>(m[a]) * m[a];
        bool in_band = msq > 0 && static_cast<double>(msq) <= j_real * j_real + 1e-9;
        if (in_band) {
            int lead = 0;
            for (int a = 0; a < n; ++a) {
                if (m[a] != 0) {
                    lead = m[a];
                    break;
                }
            }
            if (lead > 0) {
                auto [g1, g2] = gauss.pair();
                std::complex<double> z(amplitude * g1 / std::sqrt(2.0),
                                       amplitude * g2 / std::sqrt(2.0));
                std::vector<int> neg(n);
                for (int a = 0; a < n; ++a) neg[a] = -m[a];
                s.c[flat_of(m)] = z;
                s.c[flat_of(neg)] = std::conj(z);
            }
        }
        int axis = n - 1;
        while (axis >= 0) {
            if (++m[axis] <= J) break;
            m[axis] = -J;
            --axis;
        }
        if (axis < 0) break;
    }

    double residue = 0.0;
    Field f = grid.inverse(s, &residue);
    if (residue > 1e-10)
        throw NumericalError("random_band_limited: imaginary residue exceeds 1e-10");
    return f;
}

} // namespace plate
