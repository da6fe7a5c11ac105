#include "plate/quadrature.hpp"

#include <cmath>

#include "plate/errors.hpp"

namespace plate {

namespace {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (classic QUADPACK dqk15 constants).
const double wg[4] = {
    .129484966168869693270611432679082,
    .27970539148927666790146777142378,
    .381830050505118944950369775488975,
    .417959183673469387755102040816327};

const double xgk[8] = {
    .991455371120812639206854697526329,
    .949107912342758524526189684047851,
    .864864423359769072789712788640926,
    .741531185599394439863864773280788,
    .58608723546769113029414483825873,
    .405845151377397166906606412076961,
    .207784955007898467600689403773245,
    0.};

const double wgk[8] = {
    .02293532201052922496373200805897,
    .063092092629978553290700663189204,
    .104790010322250183839876322541518,
    .140653259715525918745189590510238,
    .16900472663926790282658342659855,
    .190350578064785409913256402421014,
    .204432940075298892414161999234649,
    .209482141084727828012999174891714};

struct Panel {
    double kronrod;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fc = f(center);
    double res_gauss = fc * wg[3];
    double res_kronrod = fc * wgk[7];
    for (int j = 0; j < 3; ++j) {
        int k = 2 * j + 1;
        double dx = half * xgk[k];
        double fsum = f(center - dx) + f(center + dx);
        res_gauss += wg[j] * fsum;
        res_kronrod += wgk[k] * fsum;
    }
    for (int j = 0; j < 4; ++j) {
        int k = 2 * j;
        double dx = half * xgk[k];
        res_kronrod += wgk[k] * (f(center - dx) + f(center + dx));
    }
    res_gauss *= half;
    res_kronrod *= half;
    return {res_kronrod, std::abs(res_kronrod - res_gauss)};
}

double refine(const std::function<double(double)>& f, double a, double b,
              double tol_abs, int depth, int max_depth) {
    Panel p = gk15(f, a, b);
    if (p.error <= tol_abs || depth >= max_depth) return p.kronrod;
    double mid = 0.5 * (a + b);
    return refine(f, a, mid, 0.5 * tol_abs, depth + 1, max_depth) +
           refine(f, mid, b, 0.5 * tol_abs, depth + 1, max_depth);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, int max_depth) {
    if (!(b > a)) throw ConfigError("integrate: need b > a");
    if (!(rel_tol > 0.0)) throw ConfigError("integrate: rel_tol must be positive");
    Panel whole = gk15(f, a, b);
    double scale = std::max(std::abs(whole.kronrod), 1e-300);
    double result = refine(f, a, b, rel_tol * scale, 0, max_depth);
    if (!std::isfinite(result))
        throw NumericalError("integrate: non-finite result");
    return result;
}

} // namespace plate
