#include "plate/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "plate/errors.hpp"
#include "plate/grid.hpp"
#include "plate/mild.hpp"
#include "plate/nonlinear.hpp"
#include "plate/norms.hpp"
#include "plate/propagator.hpp"
#include "plate/symbols.hpp"
#include "plate/testfunctions.hpp"
#include "plate/verify.hpp"

namespace plate {

namespace fs = std::filesystem;

std::string format_csv_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::filesystem::path resolve_out_root(const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("PLATE_OUT_ROOT"); env && *env) return env;
    return "runs";
}

namespace {

constexpr const char* kNormsHeader =
    "t,linf,hs,hs_minus1,hsp,weighted_y,weighted_x,weighted_z";
constexpr const char* kReportsHeader = "check,params,t,lhs,rhs,ratio,pass";
constexpr const char* kFitsHeader = "name,t_lo,t_hi,slope,expected,r_squared,pass";

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_text(tmp, content);
    fs::rename(tmp, path);
}

struct RunContext {
    const Config& cfg;
    fs::path dir;
    std::uint64_t base_seed = 1;
    int jobs = 1;

    std::ostringstream norms_rows;
    std::ostringstream reports_rows;
    std::ostringstream fits_rows;
    std::vector<std::string> summary;
    std::vector<std::pair<std::string, std::string>> plot_files; // name -> content
    std::vector<std::string> plot_lines;                         // gnuplot plot args
};

// ---------------------------------------------------------------------------
// Config -> objects
// ---------------------------------------------------------------------------

SpectralGrid build_grid(const Config& cfg) {
    return SpectralGrid(cfg.get_int("grid.n", 1), cfg.get_int("grid.N", 256),
                        cfg.get_double("grid.L", 40.0));
}

Dealias parse_dealias(const std::string& name) {
    if (name == "none") return Dealias::none;
    if (name == "two_thirds") return Dealias::two_thirds;
    if (name == "zero_pad") return Dealias::zero_pad;
    throw ConfigError("unknown dealias rule: " + name);
}

NonlinearityParams build_np(const Config& cfg) {
    NonlinearityParams np;
    np.lambda = cfg.get_double("nonlinear.lambda", 3.0);
    np.theta = cfg.get_double("nonlinear.theta", 1.0);
    np.delta = cfg.get_double("nonlinear.delta", -1.0);
    np.dealias = parse_dealias(cfg.get_string("nonlinear.dealias", "two_thirds"));
    return np;
}

TimeGrid build_tg(const Config& cfg) {
    TimeGrid tg;
    tg.dt = cfg.get_double("time.dt", 1e-2);
    tg.K = cfg.get_int("time.K", 100);
    tg.validate();
    return tg;
}

NormParams build_normp(const Config& cfg, int n, double T, const NonlinearityParams& np) {
    NormParams p;
    p.n = n;
    p.s = cfg.get_double("norms.s", 2.0);
    p.p = cfg.get_double("norms.p", 2.0);
    p.q = cfg.get_double("norms.q", 2.0);
    p.sigma = cfg.get_double("norms.sigma", 0.0);
    p.lambda = np.lambda;
    p.theta = np.theta;
    p.T = T;
    return p;
}

Convention build_conv(const Config& cfg) {
    std::string name = cfg.get_string("solver.convention", "paper");
    if (name == "paper") return Convention::paper;
    if (name == "ivp") return Convention::ivp;
    throw ConfigError("unknown convention: " + name);
}

Field build_data(const Config& cfg, const std::string& prefix, const SpectralGrid& g,
                 const std::string& default_kind, std::uint64_t default_seed) {
    std::string kind = cfg.get_string(prefix + ".kind", default_kind);
    double amplitude = cfg.get_double(prefix + ".amplitude", 1.0);
    if (kind == "zero") return g.make_field();
    if (kind == "gaussian")
        return gaussian(g, amplitude, cfg.get_double(prefix + ".width", 1.0));
    if (kind == "bump")
        return bump(g, amplitude, cfg.get_double(prefix + ".radius", 1.0));
    if (kind == "random")
        return random_band_limited(g, cfg.get_double(prefix + ".k_max", 4.0),
                                   cfg.get_u64(prefix + ".seed", default_seed),
                                   amplitude);
    throw ConfigError("unknown data kind for " + prefix + ": " + kind);
}

// ---------------------------------------------------------------------------
// Row writers
// ---------------------------------------------------------------------------

void append_norm_rows(RunContext& ctx, std::span<const NormRecord> records,
                      const NormParams& np) {
    const double a1 = np.alpha1();
    const double a = np.alpha();
    const double b = np.beta();
    const double gap = np.lebesgue_gap();
    for (const NormRecord& r : records) {
        double wy = std::pow(1.0 + r.t, a1) * r.linf + r.hs_u + r.hs1_ut;
        double wx = r.t > 0.0
                        ? std::pow(r.t, a) * r.hsp_u + std::pow(r.t, b) * r.hsp1_ut
                        : 0.0;
        double wz = (r.t > 0.0 && r.t < np.T)
                        ? std::pow(r.t, gap) * (r.hsp_u + r.hsp1_ut)
                        : 0.0;
        ctx.norms_rows << format_csv_double(r.t) << ',' << format_csv_double(r.linf)
                       << ',' << format_csv_double(r.hs_u) << ','
                       << format_csv_double(r.hs1_ut) << ','
                       << format_csv_double(r.hsp_u) << ',' << format_csv_double(wy)
                       << ',' << format_csv_double(wx) << ',' << format_csv_double(wz)
                       << '\n';
    }
}

void append_report_rows(RunContext& ctx, const LemmaReport& rep) {
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        ctx.reports_rows << rep.lemma << ',' << '"' << rep.parameter_point << '"'
                         << ',' << format_csv_double(rep.t[i]) << ','
                         << format_csv_double(rep.lhs[i]) << ','
                         << format_csv_double(rep.rhs[i]) << ','
                         << format_csv_double(rep.ratio[i]) << ','
                         << (rep.pass ? 1 : 0) << '\n';
    }
}

void append_scalar_report(RunContext& ctx, const std::string& check,
                          const std::string& params, double t, double lhs,
                          double rhs, bool pass) {
    ctx.reports_rows << check << ',' << '"' << params << '"' << ','
                     << format_csv_double(t) << ',' << format_csv_double(lhs) << ','
                     << format_csv_double(rhs) << ','
                     << format_csv_double(lhs / std::max(rhs, 1e-300)) << ','
                     << (pass ? 1 : 0) << '\n';
}

void append_fit_row(RunContext& ctx, const std::string& name, const DecayFit& fit) {
    ctx.fits_rows << name << ',' << format_csv_double(fit.t_lo) << ','
                  << format_csv_double(fit.t_hi) << ','
                  << format_csv_double(fit.slope) << ','
                  << format_csv_double(fit.expected) << ','
                  << format_csv_double(fit.r_squared) << ',' << (fit.pass ? 1 : 0)
                  << '\n';
}

void add_plot(RunContext& ctx, const std::string& name,
              const std::vector<std::pair<double, double>>& series,
              const std::string& title) {
    std::ostringstream dat;
    for (const auto& [t, v] : series)
        dat << format_csv_double(t) << ' ' << format_csv_double(v) << '\n';
    ctx.plot_files.emplace_back(name + ".dat", dat.str());
    ctx.plot_lines.push_back("'plotdata/" + name + ".dat' with lines title '" +
                             title + "'");
}

std::string lemma_summary_line(const LemmaReport& rep) {
    std::ostringstream line;
    line << rep.lemma << " [" << rep.parameter_point << "]: C_emp = " << rep.c_emp
         << (rep.explicit_constant ? " (proof constant 1)" : "")
         << (rep.pass ? " PASS" : " FAIL");
    if (!rep.note.empty()) line << " — " << rep.note;
    return line.str();
}

double rel_l2(const Field& a, const Field& b) {
    Field diff = a.grid->make_field();
    for (std::size_t i = 0; i < diff.v.size(); ++i) diff.v[i] = a.v[i] - b.v[i];
    double ref = lp_norm(b, 2.0);
    return lp_norm(diff, 2.0) / std::max(ref, 1e-300);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

int exp_simulate(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    SpectralGrid grid = build_grid(cfg);
    NonlinearityParams np = build_np(cfg);
    TimeGrid tg = build_tg(cfg);
    NormParams normp = build_normp(cfg, grid.dim(), tg.T(), np);
    Convention conv = build_conv(cfg);
    double cap = cfg.get_double("simulate.blowup_cap", 1e6);
    bool want_residual = cfg.get_bool("simulate.residual", false);
    Field u0 = build_data(cfg, "data.u0", grid, "gaussian", ctx.base_seed);
    Field u1 = build_data(cfg, "data.u1", grid, "zero", ctx.base_seed + 1);
    cfg.ensure_all_consumed();

    MildSolution sol = march(u0, u1, np, tg, conv, normp, cap);
    append_norm_rows(ctx, sol.records, normp);

    std::vector<std::pair<double, double>> linf_series, hs_series, wy_series;
    for (const auto& r : sol.records) {
        linf_series.emplace_back(r.t, r.linf);
        hs_series.emplace_back(r.t, r.hs_u);
        wy_series.emplace_back(r.t, std::pow(1.0 + r.t, normp.alpha1()) * r.linf +
                                        r.hs_u + r.hs1_ut);
    }
    add_plot(ctx, "linf", linf_series, "sup norm");
    add_plot(ctx, "hs", hs_series, "H^s norm");
    add_plot(ctx, "weighted_y", wy_series, "weighted Y integrand");

    for (const auto& w : sol.warnings) ctx.summary.push_back("warning: " + w);
    ctx.summary.push_back("steps stored: " + std::to_string(sol.records.size()));
    ctx.summary.push_back("diverged: " + std::string(sol.diverged ? "yes" : "no"));
    ctx.summary.push_back("Y norm: " + format_csv_double(y_norm(sol.records, normp)));
    ctx.summary.push_back("X norm: " + format_csv_double(x_norm(sol.records, normp)));
    ctx.summary.push_back("Z norm: " + format_csv_double(z_norm(sol.records, normp)));

    if (want_residual && !sol.diverged) {
        auto res = residual(sol, np);
        double worst = 0.0;
        for (const auto& [t, v] : res) worst = std::max(worst, v);
        ctx.summary.push_back("max H^-2 residual: " + format_csv_double(worst));
        add_plot(ctx, "residual", res, "H^-2 residual");
    }
    return sol.diverged ? 2 : 0;
}

int exp_picard(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    SpectralGrid grid = build_grid(cfg);
    NonlinearityParams np = build_np(cfg);
    TimeGrid tg = build_tg(cfg);
    NormParams normp = build_normp(cfg, grid.dim(), tg.T(), np);
    Convention conv = build_conv(cfg);
    PicardConfig pc;
    pc.max_iters = cfg.get_int("picard.max_iters", 20);
    pc.tol = cfg.get_double("picard.tol", 1e-8);
    pc.ball_radius = cfg.get_double("picard.ball_radius", 0.0);
    std::string nk = cfg.get_string("picard.norm", "Y");
    if (nk == "Y") pc.norm_kind = TrajectoryNorm::Y;
    else if (nk == "X") pc.norm_kind = TrajectoryNorm::X;
    else if (nk == "Z") pc.norm_kind = TrajectoryNorm::Z;
    else throw ConfigError("picard.norm must be Y, X, or Z");
    Field u0 = build_data(cfg, "data.u0", grid, "gaussian", ctx.base_seed);
    Field u1 = build_data(cfg, "data.u1", grid, "zero", ctx.base_seed + 1);
    cfg.ensure_all_consumed();

    PicardResult res = picard(u0, u1, np, tg, conv, normp, pc);
    append_norm_rows(ctx, res.solution.records, normp);

    std::vector<std::pair<double, double>> dist_series;
    for (std::size_t m = 0; m < res.distances.size(); ++m) {
        dist_series.emplace_back(static_cast<double>(m + 1), res.distances[m]);
        ctx.summary.push_back("sweep " + std::to_string(m + 1) + ": distance = " +
                              format_csv_double(res.distances[m]));
    }
    for (std::size_t m = 0; m < res.ratios.size(); ++m) {
        append_scalar_report(ctx, "picard_ratio", "sweep " + std::to_string(m + 2),
                             static_cast<double>(m + 2), res.distances[m + 1],
                             res.distances[m], res.ratios[m] < 1.0);
    }
    add_plot(ctx, "distances", dist_series, "Picard sweep distance");

    ctx.summary.push_back("iterations: " + std::to_string(res.iterations));
    ctx.summary.push_back("converged: " + std::string(res.converged ? "yes" : "no"));
    ctx.summary.push_back("non_contraction: " +
                          std::string(res.non_contraction ? "yes" : "no"));
    ctx.summary.push_back("stayed_in_ball: " +
                          std::string(res.stayed_in_ball ? "yes" : "no"));
    for (const auto& w : res.solution.warnings) ctx.summary.push_back("warning: " + w);
    return (res.converged && !res.non_contraction) ? 0 : 3;
}

int exp_verify_linear(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    SpectralGrid grid = build_grid(cfg);
    NonlinearityParams np = build_np(cfg);
    NormParams params = build_normp(cfg, grid.dim(), 1.0, np);
    Field g = build_data(cfg, "data.u0", grid, "gaussian", ctx.base_seed);
    double t_lo = cfg.get_double("verify.t_lo", 1.0);
    double t_hi = cfg.get_double("verify.t_hi", 100.0);
    int per_decade = cfg.get_int("verify.per_decade", 16);
    std::vector<std::string> names;
    std::string which = cfg.get_string("verify.lemmas", "all");
    if (which == "all") {
        for (const char* n :
             {"lambda_linf_t", "lambda_linf_1pt", "dts_linf", "slap_linf", "dts_hs",
              "dt2s_hs", "slap_hs", "dtslap_hs", "corodat_dts", "corodat_slap",
              "lambda_hsp", "dtlambda_hsp", "coro1_hs", "coro2_hs", "dts_hsp",
              "dt2s_hsp", "slap_hsp", "dtslap_hsp"})
            names.push_back(n);
    } else {
        std::istringstream in(which);
        std::string item;
        while (std::getline(in, item, ',')) {
            std::size_t b = item.find_first_not_of(" \t");
            std::size_t e = item.find_last_not_of(" \t");
            if (b != std::string::npos) names.push_back(item.substr(b, e - b + 1));
        }
    }
    cfg.ensure_all_consumed();

    std::vector<double> t_grid = log_spaced(t_lo, t_hi, per_decade);
    bool all_pass = true;
    for (const std::string& name : names) {
        auto [rep, fit] = check_linear_lemma(linear_lemma_from_string(name), g,
                                             params, t_grid);
        append_report_rows(ctx, rep);
        ctx.summary.push_back(lemma_summary_line(rep));
        std::vector<std::pair<double, double>> ratio_series;
        for (std::size_t i = 0; i < rep.t.size(); ++i)
            ratio_series.emplace_back(rep.t[i], rep.ratio[i]);
        add_plot(ctx, rep.lemma + "_ratio", ratio_series, rep.lemma + " ratio");
        if (fit) {
            append_fit_row(ctx, rep.lemma, *fit);
            std::ostringstream line;
            line << rep.lemma << " fit: slope " << fit->slope << " (expected "
                 << fit->expected << "), r^2 " << fit->r_squared
                 << (fit->pass ? " PASS" : " FAIL");
            ctx.summary.push_back(line.str());
        }
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 3;
}

int exp_verify_nonlinear(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    NonlinearityParams np = build_np(cfg);
    NormParams params;
    params.n = cfg.get_int("grid.n", 1);
    params.s = cfg.get_double("norms.s", 0.2);
    params.p = cfg.get_double("norms.p", 2.0);
    params.q = cfg.get_double("norms.q", 4.0);
    params.sigma = cfg.get_double("norms.sigma", 0.0);
    params.lambda = np.lambda;
    params.theta = np.theta;
    int reps = cfg.get_int("estimate.reps", 5);
    int N = cfg.get_int("estimate.N", 128);
    double L = cfg.get_double("estimate.L", 20.0);
    double k_max = cfg.get_double("data.k_max", 4.0);
    double amplitude = cfg.get_double("data.amplitude", 1.0);
    std::string which = cfg.get_string("estimate.which", "both");
    cfg.ensure_all_consumed();

    std::uint64_t base = ctx.base_seed;
    FieldSampler sampler = [k_max, amplitude, base](const SpectralGrid& g,
                                                    std::uint64_t seed) {
        return random_band_limited(g, k_max, base + seed, amplitude);
    };

    bool all_pass = true;
    auto run_one = [&](NonlinearEstimate est) {
        EstimateReport rep = check_nonlinear_estimate(est, params, sampler, reps, N, L);
        append_scalar_report(ctx, rep.which + "_base", rep.parameter_point, 0.0,
                             rep.c_emp, 1.0, rep.pass);
        append_scalar_report(ctx, rep.which + "_refined", rep.parameter_point, 0.0,
                             rep.c_emp_refined, 1.0, rep.pass);
        std::ostringstream line;
        line << rep.which << " [" << rep.parameter_point << "]: C_emp = " << rep.c_emp
             << " (base), " << rep.c_emp_refined << " (refined)"
             << (rep.pass ? " PASS" : " FAIL");
        if (!rep.note.empty()) line << " — " << rep.note;
        ctx.summary.push_back(line.str());
        all_pass = all_pass && rep.pass;
    };
    if (which == "difference" || which == "both")
        run_one(NonlinearEstimate::difference);
    if (which == "leibnitz" || which == "both") run_one(NonlinearEstimate::leibnitz);
    if (which != "difference" && which != "leibnitz" && which != "both")
        throw ConfigError("estimate.which must be difference, leibnitz, or both");
    return all_pass ? 0 : 3;
}

int exp_verify_integrals(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    std::vector<double> gamma_n = cfg.has("integrals.gamma_n")
                                      ? cfg.get_double_list("integrals.gamma_n")
                                      : std::vector<double>{1.0, 2.0};
    std::vector<double> gamma_t = cfg.has("integrals.gamma_t")
                                      ? cfg.get_double_list("integrals.gamma_t")
                                      : std::vector<double>{1.0, 4.0, 16.0, 64.0};
    bool have_a = cfg.has("integrals.gamma_a");
    std::vector<double> gamma_a;
    if (have_a) gamma_a = cfg.get_double_list("integrals.gamma_a");

    std::vector<std::pair<double, double>> conv_pairs;
    if (cfg.has("integrals.conv_pairs")) {
        for (const std::string& item : cfg.get_list("integrals.conv_pairs")) {
            std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("integrals.conv_pairs entries must be a:b");
            conv_pairs.emplace_back(std::stod(item.substr(0, colon)),
                                    std::stod(item.substr(colon + 1)));
        }
    } else {
        conv_pairs = {{1.0, 1.0}, {1.0, 2.0}, {0.5, 1.0}};
    }
    double conv_lo = cfg.get_double("integrals.conv_t_lo", 1.0);
    double conv_hi = cfg.get_double("integrals.conv_t_hi", 100.0);
    int conv_pd = cfg.get_int("integrals.conv_per_decade", 16);
    cfg.ensure_all_consumed();

    bool all_pass = true;
    for (double nd : gamma_n) {
        int n = static_cast<int>(nd);
        std::vector<double> a_list =
            have_a ? gamma_a : std::vector<double>{0.0, 1.0, -n + 0.1};
        for (double a : a_list) {
            LemmaReport rep = check_gamma_lemma(a, n, gamma_t);
            append_report_rows(ctx, rep);
            ctx.summary.push_back(lemma_summary_line(rep));
            all_pass = all_pass && rep.pass;
        }
    }
    std::vector<double> conv_grid = log_spaced(conv_lo, conv_hi, conv_pd);
    for (auto [a, b] : conv_pairs) {
        LemmaReport rep = check_time_convolution(a, b, conv_grid);
        append_report_rows(ctx, rep);
        ctx.summary.push_back(lemma_summary_line(rep));
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 3;
}

int exp_oracle_compare(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    SpectralGrid grid = build_grid(cfg);
    NonlinearityParams np = build_np(cfg);
    Convention conv = build_conv(cfg);
    Field u0 = build_data(cfg, "data.u0", grid, "gaussian", ctx.base_seed);
    Field u1 = build_data(cfg, "data.u1", grid, "gaussian", ctx.base_seed + 1);
    std::vector<double> times = cfg.has("oracle.times")
                                    ? cfg.get_double_list("oracle.times")
                                    : std::vector<double>{0.5, 1.0, 5.0};
    double tol = cfg.get_double("oracle.tol", 1e-7);
    bool check_nonlinear = cfg.get_bool("oracle.nonlinear", true);
    double nl_tol = cfg.get_double("oracle.nonlinear_tol", 1e-4);
    TimeGrid tg = build_tg(cfg);
    NormParams normp = build_normp(cfg, grid.dim(), tg.T(), np);
    cfg.ensure_all_consumed();

    bool all_pass = true;
    for (double t : times) {
        LinearState closed = linear_solution(u0, u1, t, conv);
        LinearState ode = mode_ode_oracle(u0, u1, t, conv);
        double err_u = rel_l2(closed.u, ode.u);
        double err_ut = rel_l2(closed.ut, ode.ut);
        bool pass = err_u <= tol && err_ut <= tol;
        append_scalar_report(ctx, "oracle_linear_u", "t=" + format_csv_double(t), t,
                             err_u, tol, err_u <= tol);
        append_scalar_report(ctx, "oracle_linear_ut", "t=" + format_csv_double(t), t,
                             err_ut, tol, err_ut <= tol);
        std::ostringstream line;
        line << "linear oracle at t=" << t << ": |u| err " << err_u << ", |u_t| err "
             << err_ut << (pass ? " PASS" : " FAIL");
        ctx.summary.push_back(line.str());
        all_pass = all_pass && pass;
    }

    if (check_nonlinear) {
        MildSolution stepped = march(u0, u1, np, tg, conv, normp);
        MildSolution reference = mol_oracle(u0, u1, np, tg.T(), tg.dt, conv, normp);
        double worst = 0.0;
        const SpectralGrid& g = grid;
        std::size_t steps = std::min(stepped.u_hat.size(), reference.u_hat.size());
        for (std::size_t k = 0; k < steps; ++k) {
            double r1 = 0.0, r2 = 0.0;
            Field a = g.inverse(stepped.u_hat[k], &r1);
            Field b = g.inverse(reference.u_hat[k], &r2);
            worst = std::max(worst, rel_l2(a, b));
        }
        bool pass = worst <= nl_tol && !stepped.diverged;
        append_scalar_report(ctx, "oracle_nonlinear", "T=" + format_csv_double(tg.T()),
                             tg.T(), worst, nl_tol, pass);
        std::ostringstream line;
        line << "nonlinear oracle over [0, " << tg.T() << "]: max rel L2 err " << worst
             << (pass ? " PASS" : " FAIL");
        ctx.summary.push_back(line.str());
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 3;
}

int exp_compare(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    std::string a = cfg.get_string("compare.a");
    std::string b = cfg.get_string("compare.b");
    double tol = cfg.get_double("compare.tolerance", 0.0);
    cfg.ensure_all_consumed();

    CompareResult res = compare_runs(a, b, tol);
    for (const auto& [col, dev] : res.per_column)
        ctx.summary.push_back("column " + col + ": max rel deviation " +
                              format_csv_double(dev));
    ctx.summary.push_back("max rel deviation: " + format_csv_double(res.max_rel_dev));
    if (!res.note.empty()) ctx.summary.push_back(res.note);
    ctx.summary.push_back(res.pass ? "runs agree within tolerance"
                                   : "runs DIFFER beyond tolerance");
    return res.pass ? 0 : 3;
}

RunSummary run_in_dir(const Config& cfg, const std::string& experiment,
                      const fs::path& dir, std::optional<std::uint64_t> seed_override,
                      int jobs);

int exp_sweep(RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    std::string key = cfg.get_string("sweep.key");
    std::vector<std::string> values = cfg.get_list("sweep.values");
    std::string sub_exp = cfg.get_string("sweep.experiment");

    Config base = cfg.without_prefix("sweep.");
    std::vector<Config> items;
    for (const std::string& v : values) items.push_back(base.with_override(key, v));

    std::vector<int> codes(items.size(), 0);
    std::vector<std::string> notes(items.size());
    std::atomic<std::size_t> next{0};
    std::mutex note_mutex;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            std::ostringstream name;
            name << "item-" << i;
            fs::path sub_dir = ctx.dir / name.str();
            try {
                RunSummary sub = run_in_dir(items[i], sub_exp, sub_dir,
                                            ctx.base_seed, 1);
                codes[i] = sub.exit_code;
                std::lock_guard<std::mutex> lock(note_mutex);
                notes[i] = name.str() + " (" + key + " = " + values[i] +
                           "): exit " + std::to_string(sub.exit_code);
            } catch (const ConfigError& e) {
                codes[i] = 1;
                std::lock_guard<std::mutex> lock(note_mutex);
                notes[i] = name.str() + ": config error: " + e.what();
            } catch (const std::exception& e) {
                codes[i] = 2;
                std::lock_guard<std::mutex> lock(note_mutex);
                notes[i] = name.str() + ": error: " + e.what();
            }
        }
    };
    int pool = std::max(1, ctx.jobs);
    std::vector<std::thread> threads;
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    int worst = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        ctx.summary.push_back(notes[i]);
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Run dispatch and filesystem layout
// ---------------------------------------------------------------------------

fs::path make_run_dir(const fs::path& root, const std::string& experiment) {
    fs::create_directories(root);
    fs::path candidate = root / experiment;
    int k = 1;
    while (fs::exists(candidate)) {
        ++k;
        candidate = root / (experiment + "-" + std::to_string(k));
    }
    fs::create_directories(candidate);
    return candidate;
}

RunSummary run_in_dir(const Config& cfg, const std::string& experiment,
                      const fs::path& dir, std::optional<std::uint64_t> seed_override,
                      int jobs) {
    fs::create_directories(dir / "plotdata");
    write_text(dir / "config.txt", cfg.source_text());

    // The CLI subcommand is authoritative; a config `experiment` key is
    // accepted (and consumed) but only used when no subcommand was given.
    std::string exp = experiment;
    if (cfg.has("experiment")) {
        std::string from_cfg = cfg.get_string("experiment");
        if (exp.empty()) exp = from_cfg;
    }
    if (exp.empty())
        throw ConfigError("no experiment selected (subcommand or `experiment` key)");

    RunContext ctx{cfg, dir};
    ctx.base_seed = seed_override.value_or(cfg.get_u64("seed", 1));
    ctx.jobs = jobs;

    auto started = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (exp == "simulate") code = exp_simulate(ctx);
        else if (exp == "picard") code = exp_picard(ctx);
        else if (exp == "verify-linear") code = exp_verify_linear(ctx);
        else if (exp == "verify-nonlinear") code = exp_verify_nonlinear(ctx);
        else if (exp == "verify-integrals") code = exp_verify_integrals(ctx);
        else if (exp == "oracle-compare") code = exp_oracle_compare(ctx);
        else if (exp == "sweep") code = exp_sweep(ctx);
        else if (exp == "compare") code = exp_compare(ctx);
        else throw ConfigError("unknown experiment: " + exp);
    } catch (const std::exception& e) {
        write_text(dir / "FAILED", std::string(e.what()) + "\n");
        throw;
    }

    write_text(dir / "norms.csv", std::string(kNormsHeader) + "\n" + ctx.norms_rows.str());
    write_text(dir / "reports.csv",
               std::string(kReportsHeader) + "\n" + ctx.reports_rows.str());
    write_text(dir / "fits.csv", std::string(kFitsHeader) + "\n" + ctx.fits_rows.str());
    for (const auto& [name, content] : ctx.plot_files)
        write_text(dir / "plotdata" / name, content);
    if (!ctx.plot_lines.empty()) {
        std::ostringstream gp;
        gp << "set terminal pngcairo size 1100,700\n"
           << "set output 'plots.png'\n"
           << "set logscale x\n"
           << "set logscale y\n"
           << "plot ";
        for (std::size_t i = 0; i < ctx.plot_lines.size(); ++i)
            gp << (i ? ", \\\n     " : "") << ctx.plot_lines[i];
        gp << "\n";
        write_text(dir / "plots.gp", gp.str());
    }

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                 started)
                       .count();
    std::ostringstream summary;
    summary << "experiment: " << exp << "\n"
            << "exit_code: " << code << "\n"
            << "seed: " << ctx.base_seed << "\n"
            << "elapsed_seconds: " << elapsed << "\n";
    for (const auto& line : ctx.summary) summary << line << "\n";
    write_text_atomic(dir / "summary.txt", summary.str());

    RunSummary out;
    out.experiment = exp;
    out.run_dir = dir;
    out.exit_code = code;
    out.lines = ctx.summary;
    return out;
}

} // namespace

RunSummary run(const Config& cfg, const std::string& experiment,
               const std::filesystem::path& out_root,
               std::optional<std::uint64_t> seed_override, int jobs) {
    std::string exp = experiment;
    if (exp.empty() && cfg.has("experiment")) {
        // Peek without consuming twice; run_in_dir consumes it again.
        Config peek = cfg;
        exp = peek.get_string("experiment");
    }
    if (exp.empty())
        throw ConfigError("no experiment selected (subcommand or `experiment` key)");
    fs::path root = out_root.empty() ? resolve_out_root("") : out_root;
    fs::path dir = make_run_dir(root, exp);
    return run_in_dir(cfg, experiment, dir, seed_override, jobs);
}

CompareResult compare_runs(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b, double tolerance) {
    auto read_csv = [](const fs::path& dir) {
        std::ifstream in(dir / "norms.csv");
        if (!in)
            throw ConfigError("compare: cannot open " + (dir / "norms.csv").string());
        std::vector<std::vector<std::string>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            rows.push_back(std::move(cells));
        }
        if (rows.empty()) throw ConfigError("compare: empty norms.csv in " + dir.string());
        return rows;
    };

    CompareResult res;
    auto a = read_csv(run_a);
    auto b = read_csv(run_b);
    if (a[0] != b[0]) {
        res.pass = false;
        res.max_rel_dev = INFINITY;
        res.note = "headers differ";
        return res;
    }
    if (a.size() != b.size()) {
        res.pass = false;
        res.max_rel_dev = INFINITY;
        res.note = "row counts differ (" + std::to_string(a.size() - 1) + " vs " +
                   std::to_string(b.size() - 1) + ")";
        return res;
    }
    const auto& header = a[0];
    for (const std::string& col : header) res.per_column[col] = 0.0;
    for (std::size_t r = 1; r < a.size(); ++r) {
        if (a[r].size() != header.size() || b[r].size() != header.size()) {
            res.pass = false;
            res.max_rel_dev = INFINITY;
            res.note = "ragged row " + std::to_string(r);
            return res;
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            double va = std::strtod(a[r][c].c_str(), nullptr);
            double vb = std::strtod(b[r][c].c_str(), nullptr);
            double dev = std::abs(va - vb) /
                         std::max({std::abs(va), std::abs(vb), 1e-300});
            if (va == vb) dev = 0.0;
            res.per_column[header[c]] = std::max(res.per_column[header[c]], dev);
            res.max_rel_dev = std::max(res.max_rel_dev, dev);
        }
    }
    res.pass = res.max_rel_dev <= tolerance;
    return res;
}

} // namespace plate
