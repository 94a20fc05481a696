#pragma once

// Secrecy metrics for a wiretap pair of independent kappa-mu channels.
//
// Rates are in nats throughout: an outage at rate R means
// ln(1 + gamma_M) - ln(1 + gamma_E) <= R.

#include <string_view>

#include "kmsec/fading.hpp"
#include "kmsec/quadrature.hpp"
#include "kmsec/specfun.hpp"

namespace kmsec::secrecy {

struct WiretapPair {
    fading::KappaMuParams main;
    fading::KappaMuParams eve;
    double rate = 0.0;  // target secrecy rate, nats

    void validate() const;
};

enum class Method { series, closed_form, quadrature, monte_carlo };

std::string_view method_tag(Method m);

struct EvalResult {
    double value = 0.0;
    int terms_k = 0;
    int terms_l = 0;  // total inner terms over all k
    double est_error = 0.0;
    Method method = Method::series;
};

// Below this kappa the integer-order closed form loses accuracy and
// spsc_closed_form hands over to the series.
inline constexpr double kClosedFormKappaMin = 1e-6;

struct ClosedFormParams {
    double A = 0.0;   // sqrt(2 kappa_E mu_E)
    double B = 0.0;   // sqrt(2 kappa_M mu_M)
    double r = 0.0;   // sqrt(beta_M / beta_E)
    double R = 0.0;   // r + 1/r
    int mu_idx = 0;   // mu_E - 1
    int v_idx = 0;    // mu_M - 1
};

// Requires integer mu on both sides and kappa > 0.
ClosedFormParams make_closed_form_params(const WiretapPair& pair);

// C(n, k) for integers, zero unless 0 <= k <= n.
double binomial(int n, int k);

// exp(-(A^2 r + B^2 / r) / (2R)) sum_{m=-mu}^{v} (A/(Br))^m I_m(AB/R) {...},
// the finite correction term of the closed form.
double closed_form_correction(const ClosedFormParams& cf);

// The Q_1 / I_0 part P' of the closed form.
double closed_form_p_prime(const ClosedFormParams& cf);

// ln(1 + gamma_m) - ln(1 + gamma_e) when positive, else 0.
double secrecy_capacity(double gamma_m, double gamma_e);

// P(gamma_M > gamma_E) by the double Poisson/2F1 series. kappa = 0 on either
// side is replaced by fading::kKappaEpsilon. The rate field is ignored.
EvalResult spsc_series(const WiretapPair& pair, const specfun::SeriesControl& ctl = {});

// Integer-mu closed form. Throws DomainError for noninteger mu; falls back to
// spsc_series (and reports Method::series) when either kappa < kClosedFormKappaMin.
EvalResult spsc_closed_form(const WiretapPair& pair);

// P(gamma_M > gamma_E) = int f_E(g) (1 - F_M(g)) dg by adaptive quadrature.
EvalResult spsc_quadrature(const WiretapPair& pair, const quad::QuadratureControl& qctl = {1e-9, 0.0, 4000});

// P(gamma_M <= e^R gamma_E) by the same double series with beta_M scaled by e^R.
EvalResult sop_lower(const WiretapPair& pair, const specfun::SeriesControl& ctl = {});

// The same probability as sop_lower, by adaptive quadrature over gamma_E.
EvalResult sop_lower_quadrature(const WiretapPair& pair,
                                const quad::QuadratureControl& qctl = {1e-9, 0.0, 4000});

// P(gamma_M <= e^R (1 + gamma_E) - 1) by adaptive quadrature over gamma_E.
EvalResult sop_exact(const WiretapPair& pair, const quad::QuadratureControl& qctl = {1e-9, 0.0, 4000});

// Rice/Rice closed form in terms of K factors and average SNRs.
double spsc_rice_reference(double k_m, double k_e, double gbar_m, double gbar_e);

// gbar_m / (gbar_m + gbar_e).
double spsc_rayleigh_reference(double gbar_m, double gbar_e);

}  // namespace kmsec::secrecy
