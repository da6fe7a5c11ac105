#include <cmath>

#include "doctest.h"
#include "plate/errors.hpp"
#include "plate/grid.hpp"
#include "plate/norms.hpp"
#include "plate/propagator.hpp"
#include "plate/symbols.hpp"
#include "plate/testfunctions.hpp"

using namespace plate;

TEST_CASE("Gaussian Lebesgue norms frozen from closed forms") {
    SpectralGrid g(1, 256, 20.0);
    // || e^{-x^2} ||_2 = (pi/2)^{1/4}, via width w = 1/sqrt(2)
    Field narrow = gaussian(g, 1.0, 1.0 / std::sqrt(2.0));
    CHECK(lp_norm(narrow, 2.0) ==
          doctest::Approx(1.11951513492024762854).epsilon(1e-12));
    // || e^{-x^2/2} ||_2 = pi^{1/4}
    Field unit = gaussian(g, 1.0, 1.0);
    CHECK(lp_norm(unit, 2.0) ==
          doctest::Approx(1.33133536380038971280).epsilon(1e-12));
    // || e^{-x^2/2} ||_1 = sqrt(2 pi)
    CHECK(lp_norm(unit, 1.0) ==
          doctest::Approx(2.50662827463100050242).epsilon(1e-12));
    // sup norm is the amplitude
    CHECK(lp_norm(unit, INFINITY) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(lp_norm(unit, 0.5), ConfigError);
}

TEST_CASE("H^0 equals L^2 through Parseval") {
    SpectralGrid g(1, 128, 15.0);
    Field f = random_band_limited(g, 6.0, 5, 1.0);
    CHECK(sobolev_norm(g.forward(f), 0.0) ==
          doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
    CHECK(sobolev_norm(f, 2.0) ==
          doctest::Approx(sobolev_norm(g.forward(f), 2.0)).epsilon(1e-13));
}

TEST_CASE("Bessel norm at p = 2 is bitwise the Sobolev norm") {
    SpectralGrid g(1, 64, 10.0);
    Field f = gaussian(g, 1.0, 1.0);
    CHECK(bessel_norm(f, 1.5, 2.0) == sobolev_norm(f, 1.5));
    // and for p != 2 it matches a hand-built multiplier + L^p evaluation
    Spectrum fh = g.forward(f);
    Spectrum weighted = g.make_spectrum();
    for (std::size_t i = 0; i < g.size(); ++i)
        weighted.c[i] = std::pow(1.0 + g.xi_sq()[i], 0.75) * fh.c[i];
    Field w = g.inverse(weighted);
    CHECK(bessel_norm(f, 1.5, 4.0) ==
          doctest::Approx(lp_norm(w, 4.0)).epsilon(1e-12));
}

TEST_CASE("derived exponents of the parameter bundle") {
    NormParams p;
    p.n = 1;
    p.s = 2.0;
    p.p = 2.0;
    p.lambda = 3.0;
    p.theta = 1.0;
    CHECK(p.p_prime() == doctest::Approx(2.0));
    CHECK(p.alpha1() == doctest::Approx(0.5));
    CHECK(p.lebesgue_gap() == doctest::Approx(0.0));
    CHECK(p.alpha() == doctest::Approx(0.5));
    CHECK(p.beta() == doctest::Approx(0.5));

    p.p = 4.0;
    CHECK(p.p_prime() == doctest::Approx(4.0 / 3.0));
    CHECK(p.lebesgue_gap() == doctest::Approx(0.25));

    p.p = INFINITY;
    CHECK(p.p_prime() == doctest::Approx(1.0));
    CHECK(p.lebesgue_gap() == doctest::Approx(0.5));

    p.n = 2;
    p.theta = 0.5;
    CHECK(p.alpha1() == doctest::Approx(0.5)); // (2 + 2(0.5-1))/2
}

TEST_CASE("record_norms mirrors the standalone norm functions") {
    SpectralGrid g(1, 64, 10.0);
    Field u = gaussian(g, 1.0, 1.0);
    Field ut = gaussian(g, 0.3, 2.0);
    NormParams params;
    params.n = 1;
    params.s = 2.0;
    params.p = 2.0;
    NormRecord r = record_norms(g.forward(u), g.forward(ut), 1.5, params);
    CHECK(r.t == 1.5);
    CHECK(r.linf == doctest::Approx(lp_norm(u, INFINITY)).epsilon(1e-12));
    CHECK(r.hs_u == doctest::Approx(sobolev_norm(u, 2.0)).epsilon(1e-12));
    CHECK(r.hs1_ut == doctest::Approx(sobolev_norm(ut, 1.0)).epsilon(1e-12));
    CHECK(r.hsp_u == doctest::Approx(sobolev_norm(u, 2.0)).epsilon(1e-12));
    CHECK(r.l2_u == doctest::Approx(lp_norm(u, 2.0)).epsilon(1e-12));
}

TEST_CASE("weighted trajectory norms on synthetic records") {
    NormParams params;
    params.n = 1;
    params.s = 2.0;
    params.p = 2.0;
    params.lambda = 3.0;
    params.theta = 1.0;
    params.T = 10.0;
    // alpha1 = alpha = beta = 1/2, gap = 0
    std::vector<NormRecord> recs(2);
    recs[0] = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0};
    recs[1] = {3.0, 0.5, 1.0, 1.0, 2.0, 2.0, 0.0};

    // Y: max( 1*1 + 2 + 3, 2*0.5 + 1 + 1 ) = 6
    CHECK(y_norm(recs, params) == doctest::Approx(6.0).epsilon(1e-14));
    // X: t = 0 excluded; sqrt(3)*2 + sqrt(3)*2 = 4 sqrt(3)
    CHECK(x_norm(recs, params) ==
          doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-14));
    // Z: gap = 0 so the weight is 1; 2 + 2 = 4
    CHECK(z_norm(recs, params) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("weighted data norm agrees with its definition") {
    SpectralGrid g(1, 64, 10.0);
    Field u0 = gaussian(g, 1.0, 1.0);
    Field u1 = gaussian(g, 0.5, 1.5);
    NormParams params;
    params.n = 1;
    params.s = 2.0;
    params.p = 2.0;
    params.lambda = 3.0;
    params.theta = 1.0;
    std::vector<double> t_grid = log_spaced(0.1, 10.0, 8);

    double sup_a = 0.0, sup_b = 0.0;
    for (double t : t_grid) {
        double at = std::pow(t, params.alpha()) *
                    (sobolev_norm(apply(MultiplierKind::dtS, u0, t), 2.0) +
                     sobolev_norm(apply(MultiplierKind::SLap, u1, t), 2.0));
        double bt = std::pow(t, params.beta()) *
                    (sobolev_norm(apply(MultiplierKind::dt2S, u0, t), 1.0) +
                     sobolev_norm(apply(MultiplierKind::dtSLap, u1, t), 1.0));
        sup_a = std::max(sup_a, at);
        sup_b = std::max(sup_b, bt);
    }
    CHECK(data_norm_I0(u0, u1, t_grid, params) ==
          doctest::Approx(sup_a + sup_b).epsilon(1e-10));
}

TEST_CASE("log-spaced grids pin their endpoints") {
    auto t = log_spaced(1.0, 100.0, 8);
    REQUIRE(t.size() >= 2);
    CHECK(t.front() == 1.0);
    CHECK(t.back() == 100.0);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
    // about 8 per decade over 2 decades
    CHECK(t.size() >= 15);
    CHECK(t.size() <= 20);
}
