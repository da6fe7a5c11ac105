#pragma once

#include <cstdint>

#include "plate/grid.hpp"

namespace plate {

// The fixed battery of inputs used across tests and verification sweeps.

// A * exp(-|x|^2 / (2 w^2)).
Field gaussian(const SpectralGrid& grid, double amplitude = 1.0, double width = 1.0);

// Compactly supported bump: A * exp(1 - 1/(1 - (|x|/R)^2)) inside |x| < R,
// zero outside.  Value A at the origin, C^infinity across the edge.
Field bump(const SpectralGrid& grid, double amplitude = 1.0, double radius = 1.0);

// Random band-limited field: independent complex Gaussian coefficients of
// standard deviation `amplitude` on all modes with |k| <= k_max (zero mode
// excluded), conjugate-paired for realness.  Modes are enumerated by their
// signed integer indices (N-independent), and the RNG is a seeded
// mt19937_64 with a fixed Box-Muller transform, so the same seed realizes
// the same continuum function on any grid that resolves the band —
// refinement studies see one function at several resolutions.
Field random_band_limited(const SpectralGrid& grid, double k_max, std::uint64_t seed,
                          double amplitude = 1.0);

} // namespace plate
