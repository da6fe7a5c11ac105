#pragma once

#include <span>
#include <vector>

#include "plate/grid.hpp"

namespace plate {

// Parameter bundle for the weighted space-time norms.  Derived exponents
// are computed on demand, never stored, so they cannot drift out of sync.
// p = infinity is represented by INFINITY (1/p then evaluates to 0).
struct NormParams {
    int n = 1;          // space dimension
    double s = 2.0;     // Sobolev index for the energy component
    double p = 2.0;     // Lebesgue index for the weighted component
    double q = 2.0;     // auxiliary Lebesgue index (estimate checks)
    double sigma = 0.0; // auxiliary Sobolev index (estimate checks)
    double lambda = 3.0;
    double theta = 1.0;
    double T = 1.0;     // time horizon for the Z norm

    double p_prime() const;                 // conjugate exponent of p
    double alpha1() const;                  // (n + 2(theta - 1)) / 2
    double alpha() const;                   // [2 - theta - (n/2)(1 - 2/p)] / (lambda - 1)
    double beta() const;                    // alpha + 1 - theta
    double lebesgue_gap() const;            // (n/2)(1 - 2/p)
};

// Norms of one solution snapshot, computed once and reused by the weighted
// sup norms and the CSV writers.
struct NormRecord {
    double t = 0.0;
    double linf = 0.0;    // ||u||_inf
    double hs_u = 0.0;    // ||u||_{H^s}
    double hs1_ut = 0.0;  // ||u_t||_{H^{s-1}}
    double hsp_u = 0.0;   // ||u||_{H^s_p}
    double hsp1_ut = 0.0; // ||u_t||_{H^{s-1}_p}
    double l2_u = 0.0;    // ||u||_2
};

// Lattice L^p norm with Riemann weights dx^n; p = INFINITY gives the grid
// maximum (the discrete stand-in for the essential sup).
double lp_norm(const Field& f, double p);

// H^s norm straight from the coefficients:
// sqrt( sum (1+|xi|^2)^s |fhat|^2 dxi^n ).
double sobolev_norm(const Spectrum& fhat, double s);
double sobolev_norm(const Field& f, double s);

// Bessel-potential norm ||(1-Delta)^{s/2} f||_p via one multiplier and one
// inverse transform.  For p == 2 this equals sobolev_norm by Parseval; the
// FFT path is only taken for p != 2 so the p = 2 value is bitwise identical
// to the coefficient-space formula.
double bessel_norm(const Field& f, double s, double p);
double bessel_norm(const Spectrum& fhat, double s, double p,
                   double guard_scale = 0.0);

// All snapshot norms at once (u and u_t given as spectra).  The FFT-path
// norms guard against Hermitian-symmetry corruption: they throw when the
// imaginary residue of an inverse transform exceeds 1e-12 of
// max(result amplitude, guard_scale).  Callers recording norms of tiny
// differences of large trajectories pass the trajectory amplitude as
// guard_scale, since the difference's imaginary roundoff is inherited from
// that scale, not its own.
NormRecord record_norms(const Spectrum& uh, const Spectrum& uth, double t,
                        const NormParams& params, double guard_scale = 0.0);

// Weighted sup norms over a trajectory of records:
//   Y: sup_k [ (1+t)^{alpha1} ||u||_inf + ||u||_{H^s} + ||u_t||_{H^{s-1}} ]
//   X: sup_{t>0} [ t^alpha ||u||_{H^s_p} + t^beta ||u_t||_{H^{s-1}_p} ]
//   Z: sup_{0<t<T} t^{(n/2)(1-2/p)} ( ||u||_{H^s_p} + ||u_t||_{H^{s-1}_p} )
double y_norm(std::span<const NormRecord> records, const NormParams& params);
double x_norm(std::span<const NormRecord> records, const NormParams& params);
double z_norm(std::span<const NormRecord> records, const NormParams& params);

// Weighted data norm of Cauchy data (u0, u1): the linear evolution's
// weighted sup, evaluated over the given time grid,
//   sup t^alpha  ( ||dtS u0||_{H^s_p}   + ||S Delta u1||_{H^s_p} )
// + sup t^beta   ( ||dt2S u0||_{H^{s-1}_p} + ||dtS Delta u1||_{H^{s-1}_p} ).
double data_norm_I0(const Field& u0, const Field& u1,
                    const std::vector<double>& t_grid, const NormParams& params);

// Log-spaced sampling grid in [t_lo, t_hi] (default 64 points per decade),
// used wherever a continuum sup over time is approximated.
std::vector<double> log_spaced(double t_lo, double t_hi, int per_decade = 64);

} // namespace plate
