#pragma once

#include <functional>

namespace kmsec::quad {

struct QuadratureControl {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int intervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod on [a, b]. The interval with the
// largest error estimate is bisected until the summed estimate is below
// max(abs_tol, rel_tol * |value|). Endpoints are never evaluated, so
// integrable endpoint singularities are fine.
//
// Throws QuadratureError when the budget runs out or the integrand is not finite.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureControl& ctl = {});

// Integral over [a, inf) through x = a + t / (1 - t), t in [0, 1).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureControl& ctl = {});

}  // namespace kmsec::quad
