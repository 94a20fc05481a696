#include "kmsec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kmsec/errors.hpp"
#include "kmsec/quadrature.hpp"

namespace kmsec::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kInnerIterationCap = 100'000;

bool is_integer(double v) { return std::floor(v) == v; }

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

// P(s,x) by its power series; valid (fast) for x < s + 1.
double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double ap = s;
    for (int n = 1; n < kInnerIterationCap; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps * 0.5) {
            return sum * std::exp(s * std::log(x) - x - log_gamma(s));
        }
    }
    throw ConvergenceError("gamma_p: series did not converge");
}

// S(a) = sum_n x^n / ((a+1)(a+2)...(a+n)), so that P(a,x) = x^a e^-x S(a) / Gamma(a+1).
double lower_gamma_kernel(double a, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < kInnerIterationCap; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * kEps * 0.5) return sum;
    }
    throw ConvergenceError("gamma_p: series did not converge");
}

// ln Q(s,x) by the Legendre continued fraction (modified Lentz); valid for x >= s + 1.
double log_gamma_q_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kInnerIterationCap; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return s * std::log(x) - x - log_gamma(s) + std::log(h);
        }
    }
    throw ConvergenceError("gamma_q: continued fraction did not converge");
}

void check_gamma_args(double s, double x) {
    require(std::isfinite(s) && s > 0.0, "incomplete gamma: shape must be positive");
    require(!std::isnan(x) && x >= 0.0, "incomplete gamma: argument must be nonnegative");
}

// Continued fraction for the incomplete beta (Lentz); converges fast for x < (a+1)/(a+b+2).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kInnerIterationCap; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw ConvergenceError("beta_inc: continued fraction did not converge");
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Direct Gauss series, Kahan-compensated.
double gauss_series(double a, double b, double c, double z, int max_terms) {
    double sum = 1.0;
    double compensation = 0.0;
    double term = 1.0;
    for (int j = 0; j < max_terms; ++j) {
        term *= (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z;
        const double y = term - compensation;
        const double t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        if (term == 0.0) return sum;
        const double next_ratio = std::abs((a + j + 1) * (b + j + 1) / ((c + j + 1) * (j + 2.0)) * z);
        if (next_ratio < 1.0 && std::abs(term) <= 0.5 * kEps * std::abs(sum) * (1.0 - next_ratio)) {
            return sum;
        }
    }
    throw ConvergenceError("gauss_2f1: direct series hit max_terms (" + std::to_string(max_terms) + ")");
}

// 2F1(1,b;c;z) through the incomplete beta, requires p = c-1 > 0 and q = b-p > 0.
double log_gauss_unit_a_beta(double b, double c, double z) {
    const double p = c - 1.0;
    const double q = b - p;
    if (z < (p + 1.0) / (p + q + 2.0)) {
        return std::log(beta_fraction(p, q, z));
    }
    const double log_front = p * std::log(z) + q * std::log1p(-z) - log_beta(p, q);
    const double complement = std::exp(log_front) * beta_fraction(q, p, 1.0 - z) / q;
    return std::log(p) - p * std::log(z) - q * std::log1p(-z) + log_beta(p, q) +
           std::log1p(-complement);
}

void check_2f1_args(double a, double b, double c, double z) {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c),
            "gauss_2f1: parameters must be finite");
    require(c > 0.0, "gauss_2f1: c must be positive");
    require(z >= 0.0 && z < 1.0, "gauss_2f1: z must lie in [0, 1)");
}

void check_marcum_args(double m, double alpha, double beta) {
    require(std::isfinite(m) && m > 0.0, "marcum_q: order must be positive");
    require(std::isfinite(alpha) && alpha >= 0.0, "marcum_q: alpha must be nonnegative");
    require(!std::isnan(beta) && beta >= 0.0, "marcum_q: beta must be nonnegative");
}

// Index of the first Poisson weight past the mode whose tail bound w_l r/(1-r),
// r = lambda/(l+1), falls below tol.
int poisson_cutoff(double lambda, double tol, int max_terms, double& tail) {
    const double log_lambda = std::log(lambda);
    double log_w = -lambda;
    for (int l = 0; l < max_terms; ++l) {
        if (l + 1 > lambda) {
            const double r = lambda / (l + 1);
            tail = std::exp(log_w) * r / (1.0 - r);
            if (tail < tol) return l;
        }
        log_w += log_lambda - std::log(l + 1.0);
    }
    throw ConvergenceError("marcum: Poisson weights need more than max_terms terms");
}

}  // namespace

void SeriesControl::validate() const {
    require(abs_tol > 0.0, "SeriesControl: abs_tol must be positive");
    require(rel_tol > 0.0, "SeriesControl: rel_tol must be positive");
    require(max_terms >= 1, "SeriesControl: max_terms must be at least 1");
}

double log_gamma(double x) {
    require(!std::isnan(x) && x > 0.0, "log_gamma: argument must be positive");
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

double gamma_p(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return -std::expm1(log_gamma_q_fraction(s, x));
}

double gamma_q(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return std::exp(log_gamma_q_fraction(s, x));
}

double log_gamma_q(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    if (x < s + 1.0) return std::log1p(-gamma_p_series(s, x));
    return log_gamma_q_fraction(s, x);
}

double upper_incomplete_gamma(double s, double x) {
    check_gamma_args(s, x);
    return std::exp(log_gamma(s) + log_gamma_q(s, x));
}

double log_bessel_i(double v, double x) {
    require(!std::isnan(x) && x >= 0.0, "bessel_i: argument must be nonnegative");
    require(std::isfinite(v), "bessel_i: order must be finite");
    if (v < 0.0) {
        if (is_integer(v)) {
            v = -v;
        } else {
            require(v > -1.0, "bessel_i: negative non-integer orders must exceed -1");
        }
    }
    if (x == 0.0) {
        if (v == 0.0) return 0.0;
        require(v > 0.0, "bessel_i: order in (-1, 0) has a pole at x = 0");
        return -std::numeric_limits<double>::infinity();
    }
    if (std::isinf(x)) return std::numeric_limits<double>::infinity();

    if (x > 30.0 && x > v * v) {
        // Hankel expansion of exp(-x) I_v(x) sqrt(2 pi x).
        const double mu4 = 4.0 * v * v;
        double sum = 1.0;
        double term = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double next = -term * (mu4 - odd * odd) / (8.0 * k * x);
            if (std::abs(next) > std::abs(term)) break;
            term = next;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
    }

    // Power series sum_k (x/2)^(v+2k) / (k! Gamma(v+k+1)), normalised by its first term.
    const double quarter_x2 = 0.25 * x * x;
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < kInnerIterationCap; ++k) {
        term *= quarter_x2 / ((k + 1.0) * (v + k + 1.0));
        sum += term;
        if (term < 1e-17 * sum) {
            return v * std::log(0.5 * x) - log_gamma(v + 1.0) + std::log(sum);
        }
    }
    throw ConvergenceError("bessel_i: power series did not converge");
}

double bessel_i(double v, double x) { return std::exp(log_bessel_i(v, x)); }

double bessel_i_scaled(double v, double x) {
    if (std::isinf(x) && x > 0.0) return 0.0;
    return std::exp(log_bessel_i(v, x) - x);
}

double beta_inc(double a, double b, double x) {
    require(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0,
            "beta_inc: shape parameters must be positive");
    require(x >= 0.0 && x <= 1.0, "beta_inc: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_fraction(b, a, 1.0 - x) / b;
}

double gauss_2f1(double a, double b, double c, double z, const SeriesControl& ctl) {
    check_2f1_args(a, b, c, z);
    ctl.validate();
    if (z == 0.0) return 1.0;
    if (z <= 0.5) return gauss_series(a, b, c, z, ctl.max_terms);
    if (a == 1.0 && c > 1.0 && b > c - 1.0) return std::exp(log_gauss_unit_a_beta(b, c, z));
    return gauss_series(a, b, c, z, ctl.max_terms);
}

double log_gauss_2f1_unit_a(double b, double c, double z, const SeriesControl& ctl) {
    check_2f1_args(1.0, b, c, z);
    ctl.validate();
    if (z == 0.0) return 0.0;
    if (z > 0.5 && c > 1.0 && b > c - 1.0) return log_gauss_unit_a_beta(b, c, z);
    return std::log(gauss_series(1.0, b, c, z, ctl.max_terms));
}

SeriesValue marcum_q_series(double m, double alpha, double beta, const SeriesControl& ctl) {
    check_marcum_args(m, alpha, beta);
    ctl.validate();
    if (beta == 0.0) return {1.0, 0.0, 1};
    const double x = 0.5 * beta * beta;
    const double lambda = 0.5 * alpha * alpha;
    if (lambda == 0.0) return {gamma_q(m, x), 0.0, 1};

    const double log_lambda = std::log(lambda);
    const double log_x = std::log(x);
    double q = gamma_q(m, x);
    double log_increment = m * log_x - x - log_gamma(m + 1.0);  // x^a e^-x / Gamma(a+1), a = m + l
    double log_w = -lambda;
    double sum = 0.0;
    double previous = 0.0;

    for (int l = 0; l < ctl.max_terms; ++l) {
        const double w = std::exp(log_w);
        const double term = w * q;
        sum += term;
        if (l + 1 > lambda) {
            if (previous > 0.0 && term < previous) {
                const double rho = term / previous;
                const double geometric = term / (1.0 - rho);
                if (geometric < ctl.abs_tol) return {std::min(sum, 1.0), geometric, l + 1};
            }
            const double r = lambda / (l + 1);
            const double poisson_tail = w * r / (1.0 - r);
            if (poisson_tail < ctl.abs_tol) return {std::min(sum, 1.0), poisson_tail, l + 1};
        }
        previous = term;
        q = std::min(1.0, q + std::exp(log_increment));
        log_increment += log_x - std::log(m + l + 1.0);
        log_w += log_lambda - std::log(l + 1.0);
    }
    throw ConvergenceError("marcum_q: series hit max_terms (" + std::to_string(ctl.max_terms) +
                           ") before the tail estimate fell below abs_tol");
}

SeriesValue marcum_p_series(double m, double alpha, double beta, const SeriesControl& ctl) {
    check_marcum_args(m, alpha, beta);
    ctl.validate();
    if (beta == 0.0) return {0.0, 0.0, 1};
    if (std::isinf(beta)) return {1.0, 0.0, 1};
    const double x = 0.5 * beta * beta;
    const double lambda = 0.5 * alpha * alpha;
    if (lambda == 0.0) return {gamma_p(m, x), 0.0, 1};

    double tail = 0.0;
    const int last = poisson_cutoff(lambda, ctl.abs_tol, ctl.max_terms, tail);
    const double log_x = std::log(x);

    // P(m+l, x) for l = 0..last. Where x >= m+l+1 the lower tail is not small and
    // 1 - Q from the (stable) upward Q recurrence is fine; below that, P is built
    // from S(a) = sum_n x^n / (a+1)_n with the stable backward recurrence
    // S(a) = 1 + x S(a+1) / (a+1).
    std::vector<double> p(static_cast<std::size_t>(last) + 1);
    int first_series = last + 1;
    for (int l = 0; l <= last; ++l) {
        if (x < m + l + 1.0) {
            first_series = l;
            break;
        }
    }
    if (first_series > 0) {
        double q = gamma_q(m, x);
        double log_increment = m * log_x - x - log_gamma(m + 1.0);
        for (int l = 0; l < first_series; ++l) {
            p[l] = 1.0 - q;
            q = std::min(1.0, q + std::exp(log_increment));
            log_increment += log_x - std::log(m + l + 1.0);
        }
    }
    if (first_series <= last) {
        const double a_top = m + last;
        double s = lower_gamma_kernel(a_top, x);
        for (int l = last; l >= first_series; --l) {
            const double a = m + l;
            if (l != last) s = 1.0 + x * s / (a + 1.0);
            p[l] = std::exp(a * log_x - x - log_gamma(a + 1.0)) * s;
        }
    }

    const double log_lambda = std::log(lambda);
    double log_w = -lambda;
    double sum = 0.0;
    for (int l = 0; l <= last; ++l) {
        sum += std::exp(log_w) * p[l];
        log_w += log_lambda - std::log(l + 1.0);
    }
    return {std::min(sum, 1.0), tail, last + 1};
}

double marcum_q(double m, double alpha, double beta, const SeriesControl& ctl) {
    return marcum_q_series(m, alpha, beta, ctl).value;
}

double marcum_p(double m, double alpha, double beta, const SeriesControl& ctl) {
    return marcum_p_series(m, alpha, beta, ctl).value;
}

double marcum_q_reference(double m, double alpha, double beta) {
    check_marcum_args(m, alpha, beta);
    auto integrand = [m, alpha](double x) {
        if (x <= 0.0) return 0.0;
        double log_g = 0.0;
        if (alpha == 0.0) {
            log_g = (2.0 * m - 1.0) * std::log(x) - (m - 1.0) * std::numbers::ln2 -
                    log_gamma(m) - 0.5 * x * x;
        } else {
            log_g = m * std::log(x) + (1.0 - m) * std::log(alpha) -
                    0.5 * (x * x + alpha * alpha) + log_bessel_i(m - 1.0, alpha * x);
        }
        return std::exp(log_g);
    };
    quad::QuadratureControl ctl;
    ctl.abs_tol = 1e-13;
    ctl.max_intervals = 4000;
    const double value = quad::integrate_to_infinity(integrand, beta, ctl).value;
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace kmsec::specfun
