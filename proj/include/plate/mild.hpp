#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plate/grid.hpp"
#include "plate/nonlinear.hpp"
#include "plate/norms.hpp"
#include "plate/symbols.hpp"

namespace plate {

// Uniform time grid t_k = k * dt, k = 0..K.
struct TimeGrid {
    double dt = 1e-2;
    int K = 100;

    double T() const { return dt * K; }
    double t(int k) const { return dt * k; }
    void validate() const;
};

// A discrete mild-solution trajectory in spectral space.
struct MildSolution {
    std::vector<Spectrum> u_hat;      // u at t_0..t_K
    std::vector<Spectrum> ut_hat;     // u_t at t_0..t_K
    std::vector<Spectrum> nonlin_hat; // |u|^lambda at t_0..t_K (as computed)
    std::vector<NormRecord> records;  // one per stored step
    TimeGrid tg;
    Convention conv = Convention::paper;
    bool diverged = false;            // hit the blow-up cap; trajectory truncated
    std::vector<std::string> warnings;
};

enum class TrajectoryNorm { Y, X, Z };

struct PicardConfig {
    int max_iters = 20;
    double tol = 1e-8;
    double ball_radius = 0.0;          // 0 disables the ball check
    TrajectoryNorm norm_kind = TrajectoryNorm::Y;
};

struct PicardResult {
    MildSolution solution;             // last iterate
    std::vector<double> distances;     // d_m = ||U^{m+1} - U^m|| per sweep
    std::vector<double> ratios;        // d_{m+1} / d_m
    bool converged = false;
    bool non_contraction = false;      // ratio >= 1 three sweeps running
    bool stayed_in_ball = true;
    int iterations = 0;
};

// Direct time-marching of the mild formulation
//   u(t_k) = [linear flow](t_k)
//          + delta * sum_{j<k} w_j LambdaTheta(t_{k-j}) |u(t_j)|^lambda,
// with trapezoidal weights w_0 = dt/2, w_j = dt for 1 <= j <= k-1.  The
// j = k node carries LambdaTheta(0) = 0, so the scheme is explicit.  u_t
// uses the differentiated kernel dtLambdaTheta the same way.
//
// Only the two kernel tables are stored, (K+1) x N^n doubles each; a guard
// rejects configurations whose tables plus trajectories exceed ~500 MB.
// When some step's sup norm exceeds blowup_cap times the data's sup norm
// the march stops, returning the partial trajectory with diverged = true
// (this is a reportable outcome, not an exception).
MildSolution march(const Field& u0, const Field& u1, const NonlinearityParams& np,
                   const TimeGrid& tg, Convention conv, const NormParams& normp,
                   double blowup_cap = 1e6);

// Picard iteration on whole trajectories: U^{0} is the linear flow, and
// each sweep maps U^m through the same discrete Duhamel sum.  Because the
// quadrature couples only to earlier nodes, the fixed point of this map is
// exactly the march trajectory.  Distances between successive sweeps are
// measured in the configured trajectory norm; three successive ratios
// >= 1 set non_contraction (flagged, not thrown).
PicardResult picard(const Field& u0, const Field& u1, const NonlinearityParams& np,
                    const TimeGrid& tg, Convention conv, const NormParams& normp,
                    const PicardConfig& pc);

// A-posteriori strong-form residual: for interior steps k in [2, K-2],
//   r_k = (1+|xi|^2) D4[u]_k + |xi|^4 u_k + |xi|^2 (u_t)_k
//         - delta |xi|^{2 theta} N_k
// in spectral space, with the fourth-order central difference
//   D4[u]_k = (-u_{k-2} + 16 u_{k-1} - 30 u_k + 16 u_{k+1} - u_{k+2}) / (12 dt^2).
// Returns (t_k, ||r_k||_{H^{-2}}) pairs.
std::vector<std::pair<double, double>> residual(const MildSolution& sol,
                                                const NonlinearityParams& np);

// Trajectory norm of a record sequence by kind.
double trajectory_norm(std::span<const NormRecord> records, TrajectoryNorm kind,
                       const NormParams& params);

} // namespace plate
