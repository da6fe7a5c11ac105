#pragma once

#include <string>
#include <vector>

#include "plate/grid.hpp"

namespace plate {

// Strategy for controlling aliasing in the pointwise power |u|^lambda.
//  - none:       evaluate on the native grid (used by estimate checks,
//                where the raw composition is the quantity of interest);
//  - two_thirds: zero all modes with any axis index |j| > N/3 after the
//                product (exact for quadratic nonlinearities);
//  - zero_pad:   evaluate on a 3/2-refined grid and truncate back.
// Non-integer powers of a sign-changing u are not band-limited, so for
// those the rules only suppress (not eliminate) aliasing; what matters for
// cross-validation is that every path through the code uses the same rule.
enum class Dealias { none, two_thirds, zero_pad };

struct NonlinearityParams {
    double lambda = 3.0;     // power, >= 2
    double theta = 1.0;      // fractional-Laplacian exponent in [0, 1]
    double delta = -1.0;     // signed coupling strength
    Dealias dealias = Dealias::two_thirds;

    // Throws ConfigError on out-of-range values; returns warnings for
    // admissible-but-delicate choices (theta at or below (2-n)/2 in the
    // given dimension).
    std::vector<std::string> validate(int n) const;
};

// |u|^lambda pointwise, with the configured dealias rule applied to the
// result.  Overflow in pow (non-finite output) raises NumericalError
// naming the grid location of max |u|.
Field power_nonlinearity(const Field& u, double lambda,
                         Dealias dealias = Dealias::two_thirds);

// (-Delta)^theta via the multiplier |xi|^{2 theta} (value 1 at xi=0 when
// theta == 0, else 0).
Field frac_laplacian(const Field& u, double theta);

// (1 - Delta)^{-1} via the multiplier 1/(1 + |xi|^2).
Field bessel_inverse(const Field& u);

// Spectral-space dealias mask application (shared with the time steppers,
// which hold trajectories as spectra).
void dealias_spectrum(Spectrum& s, Dealias rule);

} // namespace plate
