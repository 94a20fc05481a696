#include "kmsec/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>

#include "kmsec/errors.hpp"

namespace kmsec::secrecy {
namespace {

using fading::KappaMuParams;
using specfun::log_gamma;

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

bool is_positive_integer(double x) { return x >= 1.0 && std::floor(x) == x && x < 1e6; }

// Inputs to the double series. beta_m already carries any e^R scaling.
struct DoubleSeriesInput {
    double alpha_m, alpha_e, beta_m, beta_e, mu_m, mu_e;
};

// Sum over k, l of
//
//   beta_E^(mu_E+k) alpha_E^k e^-alpha_E  alpha_M^l e^-alpha_M  beta_M^(mu_M+l)
//   Gamma(mu_E+k+mu_M+l) / (k! Gamma(mu_E+k) l! Gamma(mu_M+l) (mu_E+k) (beta_M+beta_E)^(mu_E+k+mu_M+l))
//   * 2F1(1, mu_E+k+mu_M+l; mu_E+k+1; beta_E / (beta_M+beta_E)),
//
// i.e. P(gamma_M > gamma_E) with the given rates. Each (k, l) term equals
// w_k(alpha_E) w_l(alpha_M) I_z(mu_E+k, mu_M+l) for Poisson weights w, so it is
// bounded by the product of the weights; that bound gives the tail estimates.
EvalResult double_series(const DoubleSeriesInput& in, const specfun::SeriesControl& ctl) {
    ctl.validate();
    const double log_beta_e = std::log(in.beta_e);
    const double log_beta_m = std::log(in.beta_m);
    const double log_sum = std::log(in.beta_m + in.beta_e);
    const double z = in.beta_e / (in.beta_m + in.beta_e);
    const double log_1mz = log_beta_m - log_sum;
    const double log_alpha_e = std::log(in.alpha_e);
    const double log_alpha_m = std::log(in.alpha_m);

    EvalResult out;
    out.method = Method::series;
    double total = 0.0;
    double comp = 0.0;  // Kahan compensation for the outer sum
    double inner_err = 0.0;
    double outer_err = 0.0;
    int small_run = 0;
    bool done = false;

    for (int k = 0; k < ctl.max_terms; ++k) {
        const double p = in.mu_e + k;
        const double log_w_e = -in.alpha_e + k * log_alpha_e - log_gamma(k + 1.0);
        const double log_pre_k = p * log_beta_e + k * log_alpha_e - in.alpha_e - log_gamma(k + 1.0) -
                                 log_gamma(p) - std::log(p) - in.alpha_m;

        double b = p + in.mu_m;
        double log_f = specfun::log_gauss_2f1_unit_a(b, p + 1.0, z, ctl);
        double inner = 0.0;
        double prev_term = 0.0;
        bool inner_done = false;
        for (int l = 0; l < ctl.max_terms; ++l) {
            const double ql = in.mu_m + l;
            const double log_term = log_pre_k + l * log_alpha_m + ql * log_beta_m + log_gamma(b) -
                                    log_gamma(l + 1.0) - log_gamma(ql) - b * log_sum + log_f;
            const double term = std::exp(log_term);
            inner += term;
            ++out.terms_l;

            if (l + 1.0 > in.alpha_m) {
                const double rho_w = in.alpha_m / (l + 1.0);
                const double log_w_m = -in.alpha_m + l * log_alpha_m - log_gamma(l + 1.0);
                const double weight_tail = std::exp(log_w_e + log_w_m) * rho_w / (1.0 - rho_w);
                double geom_tail = std::numeric_limits<double>::infinity();
                if (l > 0 && prev_term > 0.0) {
                    const double rho = term / prev_term;
                    if (rho < 1.0) geom_tail = term / (1.0 - rho);
                }
                if (term == 0.0 && prev_term == 0.0) geom_tail = 0.0;
                const double tail = std::min(weight_tail, geom_tail);
                if (tail < ctl.abs_tol) {
                    inner_err += tail;
                    inner_done = true;
                    break;
                }
            }
            prev_term = term;
            // 2F1(1, b+1; p+1; z) from 2F1(1, b; p+1; z).
            log_f += std::log((b - p) + p * std::exp(-log_f)) - std::log(b) - log_1mz;
            b += 1.0;
        }
        if (!inner_done) {
            throw ConvergenceError("double series: inner sum did not converge within " +
                                   std::to_string(ctl.max_terms) + " terms");
        }

        const double y = inner - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
        out.terms_k = k + 1;

        if (k + 1.0 > in.alpha_e) {
            small_run = inner < ctl.abs_tol / 10.0 ? small_run + 1 : 0;
            if (small_run >= 3) {
                const double rho = in.alpha_e / (k + 1.0);
                outer_err = inner * rho / (1.0 - rho);
                done = true;
                break;
            }
        }
    }
    if (!done) {
        throw ConvergenceError("double series: outer sum did not converge within " +
                               std::to_string(ctl.max_terms) + " terms");
    }
    out.value = std::clamp(total, 0.0, 1.0);
    out.est_error = inner_err + outer_err;
    return out;
}

DoubleSeriesInput series_input(const WiretapPair& pair, double beta_m_scale) {
    const auto c = fading::make_prop_coefficients(pair.main, pair.eve);
    return {c.alpha_m, c.alpha_e, c.beta_m * beta_m_scale, c.beta_e, pair.main.mu, pair.eve.mu};
}

// int_0^inf f_E(g) h(g) dg with g = gbar_E (s / (1 - s))^q. For mu_E < 1 the
// power q = 1/mu_E cancels the g^(mu_E - 1) singularity at the origin.
EvalResult integrate_over_eve(const WiretapPair& pair, const std::function<double(double)>& h,
                              const quad::QuadratureControl& qctl) {
    const KappaMuParams& eve = pair.eve;
    const double q = std::max(1.0, 1.0 / eve.mu);
    auto integrand = [&](double s) {
        const double u = s / (1.0 - s);
        const double g = eve.gamma_bar * std::pow(u, q);
        if (!(g > 0.0) || !std::isfinite(g)) return 0.0;
        const double log_jac = std::log(eve.gamma_bar * q) + (q - 1.0) * std::log(u) - 2.0 * std::log1p(-s);
        const double log_f = fading::log_snr_pdf(eve, g) + log_jac;
        if (!std::isfinite(log_f)) return 0.0;
        return std::exp(log_f) * h(g);
    };
    const auto res = quad::integrate(integrand, 0.0, 1.0, qctl);
    EvalResult out;
    out.method = Method::quadrature;
    out.value = std::clamp(res.value, 0.0, 1.0);
    out.est_error = res.abs_error;
    out.terms_k = res.evaluations;
    out.terms_l = res.intervals;
    return out;
}

}  // namespace

void WiretapPair::validate() const {
    main.validate();
    eve.validate();
    require(std::isfinite(rate) && rate >= 0.0, "rate must be finite and >= 0");
}

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::series: return "series";
        case Method::closed_form: return "closed_form";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

double secrecy_capacity(double gamma_m, double gamma_e) {
    if (gamma_m <= gamma_e) return 0.0;
    return std::log1p(gamma_m) - std::log1p(gamma_e);
}

EvalResult spsc_series(const WiretapPair& pair, const specfun::SeriesControl& ctl) {
    pair.main.validate();
    pair.eve.validate();
    return double_series(series_input(pair, 1.0), ctl);
}

EvalResult sop_lower(const WiretapPair& pair, const specfun::SeriesControl& ctl) {
    pair.validate();
    // The leading single series is a sum of Poisson weights and equals 1.
    EvalResult r = double_series(series_input(pair, std::exp(pair.rate)), ctl);
    r.value = std::clamp(1.0 - r.value, 0.0, 1.0);
    return r;
}

double binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

ClosedFormParams make_closed_form_params(const WiretapPair& pair) {
    pair.main.validate();
    pair.eve.validate();
    require(is_positive_integer(pair.main.mu) && is_positive_integer(pair.eve.mu),
            "closed form requires integer mu on both channels");
    require(pair.main.kappa > 0.0 && pair.eve.kappa > 0.0, "closed form requires kappa > 0");
    const auto c = fading::make_prop_coefficients(pair.main, pair.eve);
    ClosedFormParams cf;
    cf.A = std::sqrt(2.0 * c.alpha_e);
    cf.B = std::sqrt(2.0 * c.alpha_m);
    cf.r = std::sqrt(c.beta_m / c.beta_e);
    cf.R = cf.r + 1.0 / cf.r;
    cf.mu_idx = static_cast<int>(pair.eve.mu) - 1;
    cf.v_idx = static_cast<int>(pair.main.mu) - 1;
    return cf;
}

double closed_form_p_prime(const ClosedFormParams& cf) {
    const double s = 1.0 + cf.r * cf.r;
    const double root = std::sqrt(s);
    const double q1 = specfun::marcum_q(1.0, cf.A * cf.r / root, cf.B / root);
    const double x = cf.A * cf.B * cf.r / s;
    const double d = cf.A * cf.r - cf.B;
    // exp(-(A^2 r^2 + B^2) / (2s)) I_0(x) = exp(-(Ar - B)^2 / (2s)) e^-x I_0(x)
    const double tail = std::exp(-d * d / (2.0 * s)) * specfun::bessel_i_scaled(0.0, x) / s;
    return q1 - tail;
}

double closed_form_correction(const ClosedFormParams& cf) {
    const int mu = cf.mu_idx;
    const int v = cf.v_idx;
    const double x = cf.A * cf.B / cf.R;
    const double sr = std::sqrt(cf.r);
    const double d = cf.A * sr - cf.B / sr;
    // exp(-(A^2 r + B^2 / r) / (2R)) = exp(-d^2 / (2R) - x)
    const double log_pre = -d * d / (2.0 * cf.R);
    const double log_ratio = std::log(cf.A / (cf.B * cf.r));
    const double log_r = std::log(cf.r);
    const double log_big_r = std::log(cf.R);
    double sum = 0.0;
    for (int m = -mu; m <= v; ++m) {
        const double log_bessel = specfun::log_bessel_i(std::abs(m), x) - x;
        const double log_m = log_pre + m * log_ratio + log_bessel;
        double brace = 0.0;
        for (int k = 1; k <= mu; ++k) {
            const double c = binomial(v + k, k + m);
            if (c == 0.0) continue;
            brace += c * std::exp(log_m + (v - k + 1) * log_r - (v + k + 1) * log_big_r);
        }
        for (int j = 1; j <= v; ++j) {
            const double c = binomial(j, m);
            if (c == 0.0) continue;
            brace -= c * std::exp(log_m + (j - 1) * log_r - (j + 1) * log_big_r);
        }
        sum += brace;
    }
    return sum;
}

EvalResult spsc_closed_form(const WiretapPair& pair) {
    pair.main.validate();
    pair.eve.validate();
    require(is_positive_integer(pair.main.mu) && is_positive_integer(pair.eve.mu),
            "closed form requires integer mu on both channels");
    if (pair.main.kappa < kClosedFormKappaMin || pair.eve.kappa < kClosedFormKappaMin) {
        return spsc_series(pair);
    }
    const ClosedFormParams cf = make_closed_form_params(pair);
    EvalResult out;
    out.method = Method::closed_form;
    out.value = std::clamp(1.0 - closed_form_p_prime(cf) - closed_form_correction(cf), 0.0, 1.0);
    out.terms_k = cf.mu_idx + cf.v_idx + 1;
    out.terms_l = 0;
    out.est_error = specfun::SeriesControl{}.abs_tol;
    return out;
}

EvalResult spsc_quadrature(const WiretapPair& pair, const quad::QuadratureControl& qctl) {
    pair.main.validate();
    pair.eve.validate();
    const KappaMuParams main = pair.main;
    return integrate_over_eve(pair, [&](double g) { return fading::snr_ccdf(main, g); }, qctl);
}

EvalResult sop_exact(const WiretapPair& pair, const quad::QuadratureControl& qctl) {
    pair.validate();
    const KappaMuParams main = pair.main;
    const double shift = std::expm1(pair.rate);
    const double scale = std::exp(pair.rate);
    return integrate_over_eve(
        pair, [&](double g) { return fading::snr_cdf(main, shift + scale * g); }, qctl);
}

EvalResult sop_lower_quadrature(const WiretapPair& pair, const quad::QuadratureControl& qctl) {
    pair.validate();
    const KappaMuParams main = pair.main;
    const double scale = std::exp(pair.rate);
    return integrate_over_eve(pair, [&](double g) { return fading::snr_cdf(main, scale * g); }, qctl);
}

double spsc_rice_reference(double k_m, double k_e, double gbar_m, double gbar_e) {
    require(k_m > 0.0 && k_e > 0.0, "Rice reference requires K > 0");
    require(gbar_m > 0.0 && gbar_e > 0.0, "Rice reference requires positive average SNRs");
    const double a = 1.0 / gbar_m;
    const double b = 1.0 / gbar_e;
    const double be = b * (1.0 + k_e);
    const double d = be + a * (1.0 + k_m);
    const double q1 = specfun::marcum_q(1.0, std::sqrt(2.0 * k_e * a * (1.0 + k_m) / d),
                                        std::sqrt(2.0 * k_m * b * (1.0 + k_e) / d));
    const double expo = (a * k_e * (1.0 + k_m) + b * k_m * (1.0 + k_e)) / d;
    const double x = 2.0 * std::sqrt(a * b * k_m * k_e * (1.0 + k_e) * (1.0 + k_m)) / d;
    return 1.0 - q1 + (be / d) * std::exp(x - expo) * specfun::bessel_i_scaled(0.0, x);
}

double spsc_rayleigh_reference(double gbar_m, double gbar_e) {
    require(gbar_m > 0.0 && gbar_e > 0.0, "Rayleigh reference requires positive average SNRs");
    return gbar_m / (gbar_m + gbar_e);
}

}  // namespace kmsec::secrecy
