#pragma once

#include <vector>

#include "plate/grid.hpp"

namespace plate {

// Fourier multipliers of the linearized equation
//
//     (1 + |xi|^2) r^2 + |xi|^2 r + |xi|^4 = 0,
//
// whose characteristic roots are r = -a(xi) +- i phi(xi) with
//
//     a(xi)   = |xi|^2 / (2 (1 + |xi|^2)),
//     phi(xi) = |xi|^2 sqrt(3 + 4 |xi|^2) / (2 (1 + |xi|^2)),
//
// so every entry decays like e^{-a t} and oscillates at rate phi.
// The useful exact identity a/phi = 1/sqrt(3 + 4 |xi|^2) removes all
// 0/0 ratios except the single sinc factor sin(phi t)/phi, which gets a
// degree-3 Taylor branch when phi*t is tiny.
enum class MultiplierKind {
    S,             // e^{-a t} sin(phi t) / phi
    dtS,           // d/dt S
    dt2S,          // d^2/dt^2 S
    SLap,          // -|xi|^2 S                   (S composed with Laplacian)
    dtSLap,        // -|xi|^2 dtS
    LambdaTheta,   // S * |xi|^{2 theta} / (1 + |xi|^2)
    dtLambdaTheta, // dtS * |xi|^{2 theta} / (1 + |xi|^2)
    P_ivp,         // e^{-a t} [cos(phi t) + sin(phi t)/sqrt(3+4|xi|^2)]
    dtP_ivp        // d/dt P_ivp
};

// Two self-consistent linear solution maps coexist:
//  - paper: u = dtS(t) u0 + S(t) Delta u1, which has
//           u_t(0) = -(|xi|^2/(1+|xi|^2)) u0^ + Delta u1 in Fourier space;
//  - ivp:   u = P_ivp(t) u0 + S(t) Delta u1, which attains
//           u_t(0) = Delta u1 exactly.
// Both are solutions of the linear equation; they differ in which Cauchy
// data the u0 slot carries.  All propagators and oracles take the
// convention explicitly so cross-checks stay consistent.
enum class Convention { paper, ivp };

// Multiplier applied to the u0 slot of the linear solution map, and its
// time derivative (used for u_t and for seeding time-stepping oracles).
MultiplierKind u0_kind(Convention c);
MultiplierKind u0_dt_kind(Convention c);

// Scalar multiplier value as a function of |xi|^2 >= 0 and t >= 0.
// theta only affects LambdaTheta / dtLambdaTheta; |xi|^{2 theta} at
// xi = 0 is taken as 1 when theta == 0 and 0 otherwise.
double multiplier(MultiplierKind kind, double xi_sq, double t, double theta = 1.0);

// Vectorized over a grid's |xi|^2 table.
std::vector<double> multiplier_array(MultiplierKind kind, const SpectralGrid& grid,
                                     double t, double theta = 1.0);

// max over the grid of the oscillation rate phi(xi); time steps should
// resolve it (dt * max_oscillation <~ 0.5 for quadrature accuracy).
double max_oscillation(const SpectralGrid& grid);

// The decay / oscillation pieces themselves (exposed for tests and fits).
double symbol_decay(double xi_sq);       // a(xi)
double symbol_oscillation(double xi_sq); // phi(xi)

} // namespace plate
