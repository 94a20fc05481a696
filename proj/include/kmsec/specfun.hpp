#pragma once

// Special functions used by the kappa-mu secrecy engine.
//
// Everything here works on real arguments in double precision. Functions whose
// natural range overflows (Bessel I, 2F1 near z = 1) also come in a log or
// exponentially scaled flavour so that callers can assemble large products in
// the log domain and exponentiate once.

#include <cstdint>

namespace kmsec::specfun {

// Truncation policy shared by every infinite series in the library.
struct SeriesControl {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_terms = 10'000;

    // Throws DomainError unless abs_tol > 0, rel_tol > 0 and max_terms >= 1.
    void validate() const;
};

// A truncated-series value with its truncation diagnostics.
struct SeriesValue {
    double value = 0.0;
    double est_error = 0.0;  // estimated magnitude of the discarded tail
    int terms = 0;
};

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// Regularized incomplete gamma functions P(s,x) and Q(s,x) = 1 - P(s,x).
// Each is computed directly in the regime where it is the small one, so both
// keep relative accuracy in their own tails.
double gamma_p(double s, double x);
double gamma_q(double s, double x);

// ln Q(s,x); finite even when Q underflows.
double log_gamma_q(double s, double x);

// Upper incomplete gamma Gamma(s,x) = integral_x^inf t^(s-1) e^(-t) dt.
double upper_incomplete_gamma(double s, double x);

// Modified Bessel function of the first kind I_v(x), x >= 0.
// Orders v > -1 are accepted, as are negative integers (I_{-m} = I_m).
double bessel_i(double v, double x);
// exp(-x) * I_v(x).
double bessel_i_scaled(double v, double x);
// ln I_v(x). Returns -inf for x = 0 and v > 0.
double log_bessel_i(double v, double x);

// Regularized incomplete beta I_x(a,b).
double beta_inc(double a, double b, double x);

// Gauss hypergeometric 2F1(a,b;c;z) for 0 <= z < 1 and c > 0.
double gauss_2f1(double a, double b, double c, double z, const SeriesControl& ctl = {});
// ln 2F1(1,b;c;z); used where the function itself overflows as z -> 1.
double log_gauss_2f1_unit_a(double b, double c, double z, const SeriesControl& ctl = {});

// Generalized Marcum Q-function Q_m(alpha, beta) via the Poisson-weighted
// incomplete gamma series
//
//   Q_m(a,b) = sum_l e^{-a^2/2} (a^2/2)^l / l! * Q(m+l, b^2/2).
//
// The series stops once past the Poisson mode l* = a^2/2 when either the
// geometric tail estimate t_l / (1 - rho_l) (rho_l the empirical term ratio)
// or the Poisson tail bound drops below ctl.abs_tol. The estimate that
// triggered the stop is reported in est_error.
SeriesValue marcum_q_series(double m, double alpha, double beta, const SeriesControl& ctl = {});
// Same series for 1 - Q_m(alpha, beta), summed directly so small values keep
// their relative accuracy.
SeriesValue marcum_p_series(double m, double alpha, double beta, const SeriesControl& ctl = {});

double marcum_q(double m, double alpha, double beta, const SeriesControl& ctl = {});
double marcum_p(double m, double alpha, double beta, const SeriesControl& ctl = {});

// Direct adaptive quadrature of the Marcum Q integral
//   alpha^(1-m) int_beta^inf x^m exp(-(x^2 + alpha^2)/2) I_{m-1}(alpha x) dx.
// Slow; exists as an independent check on marcum_q.
double marcum_q_reference(double m, double alpha, double beta);

}  // namespace kmsec::specfun
