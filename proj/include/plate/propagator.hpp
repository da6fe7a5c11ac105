#pragma once

#include "plate/grid.hpp"
#include "plate/symbols.hpp"

namespace plate {

// Solution snapshot of the linear flow: u(t) and u_t(t).
struct LinearState {
    Field u;
    Field ut;
    double t = 0.0;
};

// Apply a multiplier in Fourier space: inverse( m(|xi|^2, t) * forward(f) ).
// Multipliers are real and even, so the result must stay real; an imaginary
// residue above 1e-12 of the amplitude signals Hermitian-symmetry
// corruption and raises NumericalError.
Field apply(MultiplierKind kind, const Field& f, double t, double theta = 1.0);

// Same, but with the transform of f precomputed (used by decay scans that
// reuse one input across many times).
Field apply(MultiplierKind kind, const Spectrum& fhat, double t, double theta = 1.0);

// Evolve Cauchy data (u0, u1) under the linear equation, returning u and
// u_t at time t.  The u0 slot is propagated by dtS (paper convention) or
// P_ivp (ivp convention); the u1 slot by S Delta in both.
LinearState linear_solution(const Field& u0, const Field& u1, double t,
                            Convention conv = Convention::paper);

} // namespace plate
