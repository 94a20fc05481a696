#pragma once

// The kappa-mu fading model: one channel's parameter triple, its SNR density
// and distribution, samplers, and the named special cases it contains.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "kmsec/rng.hpp"
#include "kmsec/specfun.hpp"

namespace kmsec::fading {

// Stand-in for the kappa -> 0 limit wherever a formula needs kappa > 0.
inline constexpr double kKappaEpsilon = 1e-9;

struct KappaMuParams {
    double kappa = 0.0;      // dominant-to-scattered power ratio, >= 0
    double mu = 1.0;         // cluster parameter, > 0
    double gamma_bar = 1.0;  // average SNR (linear), > 0

    void validate() const;
};

// kappa itself, or kKappaEpsilon when kappa == 0.
double effective_kappa(double kappa);

// Cluster construction of an integer-mu channel: R^2 = sum_i (X_i + p_i)^2 + (Y_i + q_i)^2
// with X_i, Y_i ~ N(0, sigma^2).
struct ClusterSpec {
    int mu_int = 1;
    double sigma = 1.0;
    std::vector<double> p;
    std::vector<double> q;

    double dominant_power() const;  // d^2 = sum p_i^2 + q_i^2
    double kappa() const;           // d^2 / (2 mu sigma^2)
};

// sigma^2 = gamma_bar / (2 mu (1 + kappa)) and d^2 = 2 kappa mu sigma^2, split
// evenly over the in-phase and quadrature means. Requires integer mu.
ClusterSpec make_cluster_spec(const KappaMuParams& p);

// Coefficients shared by the series for the wiretap metrics.
struct PropCoefficients {
    double a = 0.0;        // 1 / gamma_bar_M
    double b = 0.0;        // 1 / gamma_bar_E
    double alpha_m = 0.0;  // kappa_M mu_M
    double alpha_e = 0.0;  // kappa_E mu_E
    double beta_m = 0.0;   // (kappa_M + 1) a mu_M
    double beta_e = 0.0;   // (kappa_E + 1) b mu_E
};

// kappa == 0 is replaced by kKappaEpsilon so that every field is positive.
PropCoefficients make_prop_coefficients(const KappaMuParams& main, const KappaMuParams& eve);

// SNR density. Defined for gamma > 0; at gamma = 0 it is finite only for mu >= 1
// (a DomainError is thrown for mu < 1).
double snr_pdf(const KappaMuParams& p, double gamma);
double log_snr_pdf(const KappaMuParams& p, double gamma);

// F(gamma) = 1 - Q_mu(sqrt(2 kappa mu), sqrt(2 (1 + kappa) mu gamma / gamma_bar)).
double snr_cdf(const KappaMuParams& p, double gamma, const specfun::SeriesControl& ctl = {});
// 1 - F(gamma), summed directly.
double snr_ccdf(const KappaMuParams& p, double gamma, const specfun::SeriesControl& ctl = {});

// Envelope density with RMS level r_hat: f_R(r) = f_gamma(gamma) dgamma/dr with
// gamma = gamma_bar r^2 / r_hat^2.
double envelope_pdf(double kappa, double mu, double r_hat, double r);

// SNR draws as a Poisson mixture of gammas: P ~ Poisson(kappa mu),
// G ~ Gamma(mu + P, 2), gamma = gamma_bar G / (2 mu (1 + kappa)). Valid for any
// real mu > 0, and exactly the law of snr_cdf (Marcum Q is the noncentral
// chi-square survival function).
//
// The sampler carries distribution state (cached normal deviates), so streams
// that must be reproducible independently need their own sampler.
class SnrSampler {
public:
    explicit SnrSampler(const KappaMuParams& p);
    double operator()(rng::Philox4x32& engine);

private:
    double mu_;
    double scale_;
    bool has_los_;
    std::poisson_distribution<long long> poisson_;
    std::gamma_distribution<double> gamma_;
};

// n i.i.d. draws, reproducible for a fixed seed.
std::vector<double> sample_snr(const KappaMuParams& p, std::size_t n, std::uint64_t seed);

// Integer-mu draws through the cluster construction.
std::vector<double> sample_snr_clusters(const ClusterSpec& spec, std::size_t n, std::uint64_t seed);

enum class Scenario { rayleigh, rice, nakagami_m, one_sided_gaussian, kappa_mu };

std::optional<Scenario> parse_scenario(std::string_view tag);
std::string_view scenario_tag(Scenario s);

// Parameter substitution for the named special cases. Shape parameters:
//   rayleigh, one_sided_gaussian: none
//   rice: {K}
//   nakagami_m: {m}
//   kappa_mu: {kappa, mu}
// kappa -> 0 limits are returned as kKappaEpsilon.
KappaMuParams make_special_case(Scenario s, std::span<const double> shape, double gamma_bar = 1.0);
KappaMuParams make_special_case(std::string_view tag, std::span<const double> shape,
                                double gamma_bar = 1.0);

}  // namespace kmsec::fading
