// Python bindings for the main operations: grids and test data, the scalar
// multipliers and their grid application, the linear and nonlinear solvers,
// norms, decay fits, and the analytic lemma / theorem-hypothesis checks.
// Fields cross the boundary as plain lists of floats in the grid's
// row-major layout; everything returned is detached plain data.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "plate/errors.hpp"
#include "plate/grid.hpp"
#include "plate/mild.hpp"
#include "plate/nonlinear.hpp"
#include "plate/norms.hpp"
#include "plate/propagator.hpp"
#include "plate/symbols.hpp"
#include "plate/testfunctions.hpp"
#include "plate/verify.hpp"

namespace py = pybind11;
using namespace plate;

namespace {

MultiplierKind kind_from(const std::string& name) {
    static const std::map<std::string, MultiplierKind> table = {
        {"S", MultiplierKind::S},
        {"dtS", MultiplierKind::dtS},
        {"dt2S", MultiplierKind::dt2S},
        {"SLap", MultiplierKind::SLap},
        {"dtSLap", MultiplierKind::dtSLap},
        {"LambdaTheta", MultiplierKind::LambdaTheta},
        {"dtLambdaTheta", MultiplierKind::dtLambdaTheta},
        {"P_ivp", MultiplierKind::P_ivp},
        {"dtP_ivp", MultiplierKind::dtP_ivp},
    };
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown multiplier kind '" + name + "'");
    return it->second;
}

Convention conv_from(const std::string& name) {
    if (name == "paper") return Convention::paper;
    if (name == "ivp") return Convention::ivp;
    throw ConfigError("unknown convention '" + name + "' (want paper or ivp)");
}

TrajectoryNorm traj_norm_from(const std::string& name) {
    if (name == "Y") return TrajectoryNorm::Y;
    if (name == "X") return TrajectoryNorm::X;
    if (name == "Z") return TrajectoryNorm::Z;
    throw ConfigError("unknown trajectory norm '" + name + "' (want Y, X or Z)");
}

Field to_field(const SpectralGrid& g, const std::vector<double>& v) {
    if (v.size() != g.size())
        throw ConfigError("field has " + std::to_string(v.size()) +
                          " values but the grid has " + std::to_string(g.size()));
    Field f = g.make_field();
    f.v = v;
    return f;
}

NormParams make_params(int n, double s, double p, double q, double sigma,
                       double lam, double theta, double T) {
    NormParams params;
    params.n = n;
    params.s = s;
    params.p = p;
    params.q = q;
    params.sigma = sigma;
    params.lambda = lam;
    params.theta = theta;
    params.T = T;
    return params;
}

py::dict records_dict(const std::vector<NormRecord>& records) {
    std::vector<double> t, linf, hs_u, hs1_ut, hsp_u, hsp1_ut, l2_u;
    for (const NormRecord& r : records) {
        t.push_back(r.t);
        linf.push_back(r.linf);
        hs_u.push_back(r.hs_u);
        hs1_ut.push_back(r.hs1_ut);
        hsp_u.push_back(r.hsp_u);
        hsp1_ut.push_back(r.hsp1_ut);
        l2_u.push_back(r.l2_u);
    }
    py::dict d;
    d["t"] = t;
    d["linf"] = linf;
    d["hs_u"] = hs_u;
    d["hs1_ut"] = hs1_ut;
    d["hsp_u"] = hsp_u;
    d["hsp1_ut"] = hsp1_ut;
    d["l2_u"] = l2_u;
    return d;
}

py::dict lemma_dict(const LemmaReport& rep) {
    py::dict d;
    d["lemma"] = rep.lemma;
    d["parameter_point"] = rep.parameter_point;
    d["t"] = rep.t;
    d["lhs"] = rep.lhs;
    d["rhs"] = rep.rhs;
    d["ratio"] = rep.ratio;
    d["c_emp"] = rep.c_emp;
    d["explicit_constant"] = rep.explicit_constant;
    d["pass"] = rep.pass;
    d["note"] = rep.note;
    return d;
}

py::dict fit_dict(const DecayFit& fit) {
    py::dict d;
    d["t_lo"] = fit.t_lo;
    d["t_hi"] = fit.t_hi;
    d["slope"] = fit.slope;
    d["intercept"] = fit.intercept;
    d["r_squared"] = fit.r_squared;
    d["expected"] = fit.expected;
    d["tol"] = fit.tol;
    d["degenerate"] = fit.degenerate;
    d["pass"] = fit.pass;
    d["note"] = fit.note;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pseudospectral solver for the damped plate equation with "
              "rotational inertia";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<SpectralGrid>(m, "Grid")
        .def(py::init<int, int, double>(), py::arg("n"), py::arg("N"),
             py::arg("L"))
        .def_property_readonly("n", &SpectralGrid::dim)
        .def_property_readonly("N", &SpectralGrid::points_per_axis)
        .def_property_readonly("L", &SpectralGrid::half_length)
        .def_property_readonly("size", &SpectralGrid::size)
        .def_property_readonly("dx", &SpectralGrid::dx)
        .def_property_readonly("dxi", &SpectralGrid::dxi)
        .def_property_readonly("max_xi_sq", &SpectralGrid::max_xi_sq)
        .def("coord", &SpectralGrid::coord, py::arg("flat"), py::arg("axis"))
        .def("xi_sq",
             [](const SpectralGrid& g) { return g.xi_sq(); });

    m.def(
        "gaussian",
        [](const SpectralGrid& g, double amplitude, double width) {
            return gaussian(g, amplitude, width).v;
        },
        py::arg("grid"), py::arg("amplitude") = 1.0, py::arg("width") = 1.0);
    m.def(
        "bump",
        [](const SpectralGrid& g, double amplitude, double radius) {
            return bump(g, amplitude, radius).v;
        },
        py::arg("grid"), py::arg("amplitude") = 1.0, py::arg("radius") = 1.0);
    m.def(
        "random_band_limited",
        [](const SpectralGrid& g, double k_max, std::uint64_t seed,
           double amplitude) {
            return random_band_limited(g, k_max, seed, amplitude).v;
        },
        py::arg("grid"), py::arg("k_max"), py::arg("seed"),
        py::arg("amplitude") = 1.0);

    m.def(
        "multiplier",
        [](const std::string& kind, double xi_sq, double t, double theta) {
            return multiplier(kind_from(kind), xi_sq, t, theta);
        },
        py::arg("kind"), py::arg("xi_sq"), py::arg("t"), py::arg("theta") = 1.0);
    m.def("symbol_decay", &symbol_decay, py::arg("xi_sq"));
    m.def("symbol_oscillation", &symbol_oscillation, py::arg("xi_sq"));
    m.def(
        "apply",
        [](const std::string& kind, const SpectralGrid& g,
           const std::vector<double>& f, double t, double theta) {
            return apply(kind_from(kind), to_field(g, f), t, theta).v;
        },
        py::arg("kind"), py::arg("grid"), py::arg("f"), py::arg("t"),
        py::arg("theta") = 1.0);

    m.def(
        "linear_solution",
        [](const SpectralGrid& g, const std::vector<double>& u0,
           const std::vector<double>& u1, double t, const std::string& conv) {
            LinearState st = linear_solution(to_field(g, u0), to_field(g, u1),
                                             t, conv_from(conv));
            py::dict d;
            d["t"] = st.t;
            d["u"] = st.u.v;
            d["ut"] = st.ut.v;
            return d;
        },
        py::arg("grid"), py::arg("u0"), py::arg("u1"), py::arg("t"),
        py::arg("convention") = "paper");

    m.def(
        "march",
        [](const SpectralGrid& g, const std::vector<double>& u0,
           const std::vector<double>& u1, double lam, double theta,
           double delta, double dt, int K, const std::string& conv, double s,
           double blowup_cap) {
            NonlinearityParams np;
            np.lambda = lam;
            np.theta = theta;
            np.delta = delta;
            NormParams params = make_params(g.dim(), s, 2.0, 2.0, 0.0, lam,
                                            theta, dt * K);
            TimeGrid tg{dt, K};
            MildSolution sol = march(to_field(g, u0), to_field(g, u1), np, tg,
                                     conv_from(conv), params, blowup_cap);
            py::dict d;
            d["records"] = records_dict(sol.records);
            d["diverged"] = sol.diverged;
            d["warnings"] = sol.warnings;
            d["u_final"] = g.inverse(sol.u_hat.back()).v;
            d["ut_final"] = g.inverse(sol.ut_hat.back()).v;
            return d;
        },
        py::arg("grid"), py::arg("u0"), py::arg("u1"), py::arg("lam") = 3.0,
        py::arg("theta") = 1.0, py::arg("delta") = -1.0, py::arg("dt") = 1e-2,
        py::arg("K") = 100, py::arg("convention") = "paper", py::arg("s") = 2.0,
        py::arg("blowup_cap") = 1e6);

    m.def(
        "picard",
        [](const SpectralGrid& g, const std::vector<double>& u0,
           const std::vector<double>& u1, double lam, double theta,
           double delta, double dt, int K, const std::string& conv, double s,
           int max_iters, double tol, double ball_radius,
           const std::string& norm) {
            NonlinearityParams np;
            np.lambda = lam;
            np.theta = theta;
            np.delta = delta;
            NormParams params = make_params(g.dim(), s, 2.0, 2.0, 0.0, lam,
                                            theta, dt * K);
            TimeGrid tg{dt, K};
            PicardConfig pc;
            pc.max_iters = max_iters;
            pc.tol = tol;
            pc.ball_radius = ball_radius;
            pc.norm_kind = traj_norm_from(norm);
            PicardResult res = picard(to_field(g, u0), to_field(g, u1), np, tg,
                                      conv_from(conv), params, pc);
            py::dict d;
            d["converged"] = res.converged;
            d["non_contraction"] = res.non_contraction;
            d["stayed_in_ball"] = res.stayed_in_ball;
            d["iterations"] = res.iterations;
            d["distances"] = res.distances;
            d["ratios"] = res.ratios;
            d["records"] = records_dict(res.solution.records);
            return d;
        },
        py::arg("grid"), py::arg("u0"), py::arg("u1"), py::arg("lam") = 3.0,
        py::arg("theta") = 1.0, py::arg("delta") = -1.0, py::arg("dt") = 1e-2,
        py::arg("K") = 100, py::arg("convention") = "paper", py::arg("s") = 2.0,
        py::arg("max_iters") = 20, py::arg("tol") = 1e-8,
        py::arg("ball_radius") = 0.0, py::arg("norm") = "Y");

    m.def(
        "lp_norm",
        [](const SpectralGrid& g, const std::vector<double>& f, double p) {
            return lp_norm(to_field(g, f), p);
        },
        py::arg("grid"), py::arg("f"), py::arg("p"));
    m.def(
        "sobolev_norm",
        [](const SpectralGrid& g, const std::vector<double>& f, double s) {
            return sobolev_norm(to_field(g, f), s);
        },
        py::arg("grid"), py::arg("f"), py::arg("s"));
    m.def(
        "bessel_norm",
        [](const SpectralGrid& g, const std::vector<double>& f, double s,
           double p) { return bessel_norm(to_field(g, f), s, p); },
        py::arg("grid"), py::arg("f"), py::arg("s"), py::arg("p"));
    m.def("log_spaced", &log_spaced, py::arg("t_lo"), py::arg("t_hi"),
          py::arg("per_decade") = 64);

    m.def(
        "fit_decay",
        [](const std::vector<std::pair<double, double>>& series, double expected,
           double t_lo, double t_hi, double tol) {
            return fit_dict(fit_decay(series, expected, t_lo, t_hi, tol));
        },
        py::arg("series"), py::arg("expected"), py::arg("t_lo"), py::arg("t_hi"),
        py::arg("tol") = 0.1);

    m.def(
        "check_gamma_lemma",
        [](double a, int n, const std::vector<double>& t_grid) {
            return lemma_dict(check_gamma_lemma(a, n, t_grid));
        },
        py::arg("a"), py::arg("n"), py::arg("t_grid"));
    m.def(
        "check_time_convolution",
        [](double a, double b, const std::vector<double>& t_grid) {
            return lemma_dict(check_time_convolution(a, b, t_grid));
        },
        py::arg("a"), py::arg("b"), py::arg("t_grid"));
    m.def(
        "check_linear_lemma",
        [](const std::string& id, const SpectralGrid& g,
           const std::vector<double>& f, int n, double s, double p, double q,
           double sigma, double lam, double theta,
           const std::vector<double>& t_grid) {
            auto [rep, fit] = check_linear_lemma(
                linear_lemma_from_string(id), to_field(g, f),
                make_params(n, s, p, q, sigma, lam, theta, 1.0), t_grid);
            py::dict d = lemma_dict(rep);
            d["fit"] = fit ? py::object(fit_dict(*fit)) : py::object(py::none());
            return d;
        },
        py::arg("id"), py::arg("grid"), py::arg("f"), py::arg("n") = 1,
        py::arg("s") = 2.0, py::arg("p") = 2.0, py::arg("q") = 2.0,
        py::arg("sigma") = 0.0, py::arg("lam") = 3.0, py::arg("theta") = 1.0,
        py::arg("t_grid") = std::vector<double>());

    auto predicate = [](std::vector<std::string> (*fn)(const NormParams&)) {
        return [fn](int n, double s, double p, double q, double sigma,
                    double lam, double theta) {
            return fn(make_params(n, s, p, q, sigma, lam, theta, 1.0));
        };
    };
    m.def("theorem_global_hs", predicate(&theorem_global_hs), py::arg("n") = 1,
          py::arg("s") = 2.0, py::arg("p") = 2.0, py::arg("q") = 2.0,
          py::arg("sigma") = 0.0, py::arg("lam") = 3.0, py::arg("theta") = 1.0);
    m.def("theorem_global_hsp", predicate(&theorem_global_hsp), py::arg("n") = 1,
          py::arg("s") = 2.0, py::arg("p") = 2.0, py::arg("q") = 2.0,
          py::arg("sigma") = 0.0, py::arg("lam") = 3.0, py::arg("theta") = 1.0);
    m.def("theorem_local", predicate(&theorem_local), py::arg("n") = 1,
          py::arg("s") = 2.0, py::arg("p") = 2.0, py::arg("q") = 2.0,
          py::arg("sigma") = 0.0, py::arg("lam") = 3.0, py::arg("theta") = 1.0);
}
