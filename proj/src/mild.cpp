#include "plate/mild.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plate/errors.hpp"

namespace plate {

namespace {

constexpr std::size_t kMemoryGuardBytes = 500ull * 1024 * 1024;

// The two Duhamel kernels, tabulated on the time grid.  lam[k] is the
// LambdaTheta multiplier at t = k dt over all spectral indices.
struct Kernel {
    std::vector<std::vector<double>> lam;
    std::vector<std::vector<double>> dtlam;
};

Kernel build_kernel(const SpectralGrid& g, const TimeGrid& tg, double theta) {
    const std::size_t per_table = (static_cast<std::size_t>(tg.K) + 1) * g.size();
    // Two kernel tables (doubles) plus three spectral trajectories
    // (complex doubles) is the dominant footprint of a march.
    const std::size_t bytes = per_table * (2 * sizeof(double) +
                                           3 * sizeof(std::complex<double>));
    if (bytes > kMemoryGuardBytes) {
        std::ostringstream msg;
        msg << "march: K = " << tg.K << " with " << g.size()
            << " modes needs about " << bytes / (1024 * 1024)
            << " MB of kernel/trajectory storage (limit 500 MB); "
               "reduce K or the grid size";
        throw ConfigError(msg.str());
    }
    Kernel ker;
    ker.lam.reserve(tg.K + 1);
    ker.dtlam.reserve(tg.K + 1);
    for (int k = 0; k <= tg.K; ++k) {
        ker.lam.push_back(multiplier_array(MultiplierKind::LambdaTheta, g, tg.t(k), theta));
        ker.dtlam.push_back(
            multiplier_array(MultiplierKind::dtLambdaTheta, g, tg.t(k), theta));
    }
    return ker;
}

// Linear-flow trajectory term at one time (four multiplier arrays, applied
// to the transformed data).
void linear_at(const SpectralGrid& g, const Spectrum& u0h, const Spectrum& u1h,
               double t, Convention conv, Spectrum& uh, Spectrum& uth) {
    auto mu = multiplier_array(u0_kind(conv), g, t);
    auto mut = multiplier_array(u0_dt_kind(conv), g, t);
    auto mslap = multiplier_array(MultiplierKind::SLap, g, t);
    auto mdtslap = multiplier_array(MultiplierKind::dtSLap, g, t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        uh.c[i] = mu[i] * u0h.c[i] + mslap[i] * u1h.c[i];
        uth.c[i] = mut[i] * u0h.c[i] + mdtslap[i] * u1h.c[i];
    }
}

// delta * sum_{j<k} w_j Kernel[k-j] (.) nhat[j], accumulated into uh/uth
// which already hold the linear part.  w_0 = dt/2, w_j = dt otherwise;
// the j = k node vanishes with the kernel.
void accumulate_duhamel(const Kernel& ker, const std::vector<Spectrum>& nhat, int k,
                        double dt, double delta, Spectrum& uh, Spectrum& uth) {
    const std::size_t size = uh.c.size();
    for (int j = 0; j < k; ++j) {
        const double w = delta * (j == 0 ? 0.5 * dt : dt);
        const auto& k1 = ker.lam[k - j];
        const auto& k2 = ker.dtlam[k - j];
        const auto& nj = nhat[j].c;
        for (std::size_t i = 0; i < size; ++i) {
            uh.c[i] += w * k1[i] * nj[i];
            uth.c[i] += w * k2[i] * nj[i];
        }
    }
}

Spectrum nonlinearity_hat(const SpectralGrid& g, const Spectrum& uh,
                          const NonlinearityParams& np) {
    double residue = 0.0;
    Field u = g.inverse(uh, &residue);
    if (residue > 1e-12)
        throw NumericalError("march: imaginary residue exceeds 1e-12");
    Field nu = power_nonlinearity(u, np.lambda, np.dealias);
    return g.forward(nu);
}

void check_common(const Field& u0, const Field& u1) {
    if (!u0.grid || u0.grid != u1.grid)
        throw ConfigError("march: u0 and u1 must share one grid");
}

} // namespace

void TimeGrid::validate() const {
    if (!(dt > 0.0)) throw ConfigError("time grid: dt must be positive");
    if (K < 1) throw ConfigError("time grid: K must be >= 1");
}

double trajectory_norm(std::span<const NormRecord> records, TrajectoryNorm kind,
                       const NormParams& params) {
    switch (kind) {
    case TrajectoryNorm::Y: return y_norm(records, params);
    case TrajectoryNorm::X: return x_norm(records, params);
    case TrajectoryNorm::Z: return z_norm(records, params);
    }
    throw ConfigError("trajectory_norm: unknown kind");
}

MildSolution march(const Field& u0, const Field& u1, const NonlinearityParams& np,
                   const TimeGrid& tg, Convention conv, const NormParams& normp,
                   double blowup_cap) {
    check_common(u0, u1);
    tg.validate();
    const SpectralGrid& g = *u0.grid;

    MildSolution out;
    out.tg = tg;
    out.conv = conv;
    out.warnings = np.validate(g.dim());
    if (tg.dt * max_oscillation(g) > 0.5) {
        std::ostringstream w;
        w << "dt * max oscillation rate = " << tg.dt * max_oscillation(g)
          << " > 0.5; the trapezoidal Duhamel sum under-resolves the fastest modes";
        out.warnings.push_back(w.str());
    }
    if (!(blowup_cap > 1.0)) throw ConfigError("march: blowup_cap must exceed 1");

    Kernel ker = build_kernel(g, tg, np.theta);
    Spectrum u0h = g.forward(u0);
    Spectrum u1h = g.forward(u1);
    const double ref_amp =
        std::max({lp_norm(u0, INFINITY), lp_norm(u1, INFINITY), 1e-300});

    out.u_hat.reserve(tg.K + 1);
    out.ut_hat.reserve(tg.K + 1);
    out.nonlin_hat.reserve(tg.K + 1);
    out.records.reserve(tg.K + 1);

    for (int k = 0; k <= tg.K; ++k) {
        const double t = tg.t(k);
        Spectrum uh = g.make_spectrum();
        Spectrum uth = g.make_spectrum();
        linear_at(g, u0h, u1h, t, conv, uh, uth);
        accumulate_duhamel(ker, out.nonlin_hat, k, tg.dt, np.delta, uh, uth);

        out.records.push_back(record_norms(uh, uth, t, normp));
        out.u_hat.push_back(std::move(uh));
        out.ut_hat.push_back(std::move(uth));

        // Divergence check precedes the power evaluation so a blow-up is
        // reported as a truncated trajectory instead of a pow() overflow.
        if (out.records.back().linf > blowup_cap * ref_amp) {
            out.diverged = true;
            std::ostringstream w;
            w << "blow-up cap hit at t = " << t << ": ||u||_inf = "
              << out.records.back().linf << " > " << blowup_cap << " x " << ref_amp;
            out.warnings.push_back(w.str());
            break;
        }
        out.nonlin_hat.push_back(nonlinearity_hat(g, out.u_hat.back(), np));
    }
    return out;
}

PicardResult picard(const Field& u0, const Field& u1, const NonlinearityParams& np,
                    const TimeGrid& tg, Convention conv, const NormParams& normp,
                    const PicardConfig& pc) {
    check_common(u0, u1);
    tg.validate();
    if (pc.max_iters < 1) throw ConfigError("picard: max_iters must be >= 1");
    if (!(pc.tol > 0.0)) throw ConfigError("picard: tol must be positive");
    const SpectralGrid& g = *u0.grid;

    PicardResult result;
    result.solution.tg = tg;
    result.solution.conv = conv;
    result.solution.warnings = np.validate(g.dim());

    Kernel ker = build_kernel(g, tg, np.theta);
    Spectrum u0h = g.forward(u0);
    Spectrum u1h = g.forward(u1);

    // Sweep zero: the linear flow.
    std::vector<Spectrum> lin_u(tg.K + 1), lin_ut(tg.K + 1);
    for (int k = 0; k <= tg.K; ++k) {
        lin_u[k] = g.make_spectrum();
        lin_ut[k] = g.make_spectrum();
        linear_at(g, u0h, u1h, tg.t(k), conv, lin_u[k], lin_ut[k]);
    }

    std::vector<Spectrum> cur_u = lin_u, cur_ut = lin_ut;
    std::vector<Spectrum> nhat(tg.K + 1);
    std::vector<NormRecord> diff_records(tg.K + 1), iterate_records(tg.K + 1);
    int consecutive_expanding = 0;

    for (int m = 0; m < pc.max_iters; ++m) {
        for (int k = 0; k <= tg.K; ++k) nhat[k] = nonlinearity_hat(g, cur_u[k], np);

        std::vector<Spectrum> next_u(tg.K + 1), next_ut(tg.K + 1);
        for (int k = 0; k <= tg.K; ++k) {
            next_u[k] = lin_u[k];
            next_ut[k] = lin_ut[k];
            accumulate_duhamel(ker, nhat, k, tg.dt, np.delta, next_u[k], next_ut[k]);
        }

        Spectrum du = g.make_spectrum(), dut = g.make_spectrum();
        for (int k = 0; k <= tg.K; ++k) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                du.c[i] = next_u[k].c[i] - cur_u[k].c[i];
                dut.c[i] = next_ut[k].c[i] - cur_ut[k].c[i];
            }
            iterate_records[k] = record_norms(next_u[k], next_ut[k], tg.t(k), normp);
            // Near convergence du is a roundoff-scale residue of two large
            // trajectories, so its symmetry guard must use their amplitude.
            const double scale = std::max({iterate_records[k].linf,
                                           iterate_records[k].hs_u,
                                           iterate_records[k].hs1_ut});
            diff_records[k] = record_norms(du, dut, tg.t(k), normp, scale);
        }
        double d = trajectory_norm(diff_records, pc.norm_kind, normp);
        result.distances.push_back(d);

        if (pc.ball_radius > 0.0 &&
            trajectory_norm(iterate_records, pc.norm_kind, normp) > pc.ball_radius)
            result.stayed_in_ball = false;

        cur_u = std::move(next_u);
        cur_ut = std::move(next_ut);
        result.iterations = m + 1;

        std::size_t nd = result.distances.size();
        if (nd >= 2) {
            double ratio = result.distances[nd - 1] /
                           std::max(result.distances[nd - 2], 1e-300);
            result.ratios.push_back(ratio);
            consecutive_expanding = ratio >= 1.0 ? consecutive_expanding + 1 : 0;
            if (consecutive_expanding >= 3) result.non_contraction = true;
        }
        if (d < pc.tol) {
            result.converged = true;
            break;
        }
    }

    result.solution.u_hat = std::move(cur_u);
    result.solution.ut_hat = std::move(cur_ut);
    result.solution.nonlin_hat.resize(tg.K + 1);
    result.solution.records.resize(tg.K + 1);
    for (int k = 0; k <= tg.K; ++k) {
        result.solution.nonlin_hat[k] =
            nonlinearity_hat(g, result.solution.u_hat[k], np);
        result.solution.records[k] = record_norms(
            result.solution.u_hat[k], result.solution.ut_hat[k], tg.t(k), normp);
    }
    return result;
}

std::vector<std::pair<double, double>> residual(const MildSolution& sol,
                                                const NonlinearityParams& np) {
    if (sol.u_hat.empty() || !sol.u_hat.front().grid)
        throw ConfigError("residual: empty solution");
    const SpectralGrid& g = *sol.u_hat.front().grid;
    const std::size_t steps = std::min(
        {sol.u_hat.size(), sol.ut_hat.size(), sol.nonlin_hat.size()});
    if (steps < 5)
        throw ConfigError("residual: need at least 5 stored steps for the stencil");

    const auto& xs = g.xi_sq();
    const double dt2 = sol.tg.dt * sol.tg.dt;
    std::vector<double> theta_mult(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0)
            theta_mult[i] = np.theta == 0.0 ? 1.0 : 0.0;
        else
            theta_mult[i] = std::pow(xs[i], np.theta);
    }

    std::vector<std::pair<double, double>> out;
    Spectrum r = g.make_spectrum();
    for (std::size_t k = 2; k + 2 < steps; ++k) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::complex<double> d4 =
                (-sol.u_hat[k - 2].c[i] + 16.0 * sol.u_hat[k - 1].c[i] -
                 30.0 * sol.u_hat[k].c[i] + 16.0 * sol.u_hat[k + 1].c[i] -
                 sol.u_hat[k + 2].c[i]) /
                (12.0 * dt2);
            r.c[i] = (1.0 + xs[i]) * d4 + xs[i] * xs[i] * sol.u_hat[k].c[i] +
                     xs[i] * sol.ut_hat[k].c[i] -
                     np.delta * theta_mult[i] * sol.nonlin_hat[k].c[i];
        }
        out.emplace_back(sol.tg.t(static_cast<int>(k)), sobolev_norm(r, -2.0));
    }
    return out;
}

} // namespace plate
