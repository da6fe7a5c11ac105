#pragma once

#include <functional>

namespace plate {

// Adaptive quadrature on [a, b]: 15-point Gauss-Kronrod rule with bisection
// until the embedded 7-point Gauss error estimate meets rel_tol (relative
// to the running integral magnitude, with an absolute floor).  Designed for
// the smooth decaying integrands used in the analytic verification checks.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 48);

} // namespace plate
