#include "kmsec/fading.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kmsec/errors.hpp"

namespace kmsec::fading {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void KappaMuParams::validate() const {
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be finite and >= 0");
    require(std::isfinite(mu) && mu > 0.0, "mu must be finite and > 0");
    require(std::isfinite(gamma_bar) && gamma_bar > 0.0, "gamma_bar must be finite and > 0");
}

double effective_kappa(double kappa) { return kappa == 0.0 ? kKappaEpsilon : kappa; }

double ClusterSpec::dominant_power() const {
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d2 += p[i] * p[i] + q[i] * q[i];
    return d2;
}

double ClusterSpec::kappa() const { return dominant_power() / (2.0 * mu_int * sigma * sigma); }

ClusterSpec make_cluster_spec(const KappaMuParams& params) {
    params.validate();
    require(std::floor(params.mu) == params.mu, "cluster construction needs an integer mu");
    ClusterSpec spec;
    spec.mu_int = static_cast<int>(params.mu);
    const double sigma2 = params.gamma_bar / (2.0 * params.mu * (1.0 + params.kappa));
    spec.sigma = std::sqrt(sigma2);
    const double d = std::sqrt(2.0 * params.kappa * params.mu * sigma2);
    const double mean = d / std::sqrt(2.0 * params.mu);
    spec.p.assign(spec.mu_int, mean);
    spec.q.assign(spec.mu_int, mean);
    return spec;
}

PropCoefficients make_prop_coefficients(const KappaMuParams& main, const KappaMuParams& eve) {
    main.validate();
    eve.validate();
    PropCoefficients c;
    const double km = effective_kappa(main.kappa);
    const double ke = effective_kappa(eve.kappa);
    c.a = 1.0 / main.gamma_bar;
    c.b = 1.0 / eve.gamma_bar;
    c.alpha_m = km * main.mu;
    c.alpha_e = ke * eve.mu;
    c.beta_m = (km + 1.0) * c.a * main.mu;
    c.beta_e = (ke + 1.0) * c.b * eve.mu;
    return c;
}

double log_snr_pdf(const KappaMuParams& p, double gamma) {
    p.validate();
    require(!std::isnan(gamma) && gamma >= 0.0, "snr_pdf: gamma must be >= 0");
    const double mu = p.mu;
    if (std::isinf(gamma)) return kNegInf;
    if (gamma == 0.0) {
        require(mu >= 1.0, "snr_pdf: density is unbounded at gamma = 0 for mu < 1");
        if (mu > 1.0) return kNegInf;
        return std::log1p(p.kappa) - p.kappa - std::log(p.gamma_bar);
    }
    if (p.kappa == 0.0) {
        // Gamma(mu, gamma_bar / mu) limit.
        return mu * std::log(mu / p.gamma_bar) + (mu - 1.0) * std::log(gamma) -
               mu * gamma / p.gamma_bar - specfun::log_gamma(mu);
    }
    const double kappa = p.kappa;
    const double ratio = gamma / p.gamma_bar;
    const double bessel_arg = 2.0 * mu * std::sqrt(kappa * (1.0 + kappa) * ratio);
    return std::log(mu) + 0.5 * (mu + 1.0) * std::log1p(kappa) + 0.5 * (mu - 1.0) * std::log(gamma) -
           mu * (1.0 + kappa) * ratio - 0.5 * (mu - 1.0) * std::log(kappa) -
           0.5 * (mu + 1.0) * std::log(p.gamma_bar) - mu * kappa +
           specfun::log_bessel_i(mu - 1.0, bessel_arg);
}

double snr_pdf(const KappaMuParams& p, double gamma) { return std::exp(log_snr_pdf(p, gamma)); }

double snr_cdf(const KappaMuParams& p, double gamma, const specfun::SeriesControl& ctl) {
    p.validate();
    require(!std::isnan(gamma) && gamma >= 0.0, "snr_cdf: gamma must be >= 0");
    const double x = p.mu * gamma / p.gamma_bar;
    if (p.kappa == 0.0) return specfun::gamma_p(p.mu, x);
    return specfun::marcum_p(p.mu, std::sqrt(2.0 * p.kappa * p.mu),
                             std::sqrt(2.0 * (1.0 + p.kappa) * x), ctl);
}

double snr_ccdf(const KappaMuParams& p, double gamma, const specfun::SeriesControl& ctl) {
    p.validate();
    require(!std::isnan(gamma) && gamma >= 0.0, "snr_ccdf: gamma must be >= 0");
    const double x = p.mu * gamma / p.gamma_bar;
    if (p.kappa == 0.0) return specfun::gamma_q(p.mu, x);
    return specfun::marcum_q(p.mu, std::sqrt(2.0 * p.kappa * p.mu),
                             std::sqrt(2.0 * (1.0 + p.kappa) * x), ctl);
}

double envelope_pdf(double kappa, double mu, double r_hat, double r) {
    require(std::isfinite(r_hat) && r_hat > 0.0, "envelope_pdf: r_hat must be > 0");
    require(!std::isnan(r) && r >= 0.0, "envelope_pdf: r must be >= 0");
    const KappaMuParams unit{kappa, mu, 1.0};
    unit.validate();
    if (r == 0.0) {
        // f_R ~ r^(2 mu - 1) near the origin.
        require(mu >= 0.5, "envelope_pdf: density is unbounded at r = 0 for mu < 0.5");
        if (mu > 0.5) return 0.0;
    }
    const double rho = r / r_hat;
    if (r == 0.0) {
        // mu = 1/2: limit of f_gamma(g) 2 r / r_hat^2 as g = rho^2 -> 0.
        const double c = 0.5 * (1.0 + kappa);
        return 2.0 / r_hat * std::sqrt(c / std::numbers::pi) * std::exp(-0.5 * kappa);
    }
    return std::exp(log_snr_pdf(unit, rho * rho) + std::numbers::ln2 + std::log(rho) - std::log(r_hat));
}

SnrSampler::SnrSampler(const KappaMuParams& p)
    : mu_(p.mu),
      scale_(0.0),
      has_los_(false),
      poisson_(1.0),
      gamma_(1.0, 2.0) {
    p.validate();
    scale_ = p.gamma_bar / (2.0 * p.mu * (1.0 + p.kappa));
    has_los_ = p.kappa * p.mu > 0.0;
    if (has_los_) poisson_ = std::poisson_distribution<long long>(p.kappa * p.mu);
}

double SnrSampler::operator()(rng::Philox4x32& engine) {
    const long long clusters = has_los_ ? poisson_(engine) : 0;
    using Param = std::gamma_distribution<double>::param_type;
    const double g = gamma_(engine, Param(mu_ + static_cast<double>(clusters), 2.0));
    return scale_ * g;
}

std::vector<double> sample_snr(const KappaMuParams& p, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "sample_snr: n must be >= 1");
    SnrSampler sampler(p);
    rng::Philox4x32 engine(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = sampler(engine);
    return out;
}

std::vector<double> sample_snr_clusters(const ClusterSpec& spec, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "sample_snr_clusters: n must be >= 1");
    require(spec.mu_int >= 1 && spec.p.size() == static_cast<std::size_t>(spec.mu_int) &&
                spec.q.size() == static_cast<std::size_t>(spec.mu_int),
            "sample_snr_clusters: malformed cluster spec");
    rng::Philox4x32 engine(seed, 1);
    std::normal_distribution<double> normal(0.0, spec.sigma);
    std::vector<double> out(n);
    for (auto& v : out) {
        double power = 0.0;
        for (int i = 0; i < spec.mu_int; ++i) {
            const double x = normal(engine) + spec.p[i];
            const double y = normal(engine) + spec.q[i];
            power += x * x + y * y;
        }
        v = power;
    }
    return out;
}

std::optional<Scenario> parse_scenario(std::string_view tag) {
    if (tag == "rayleigh") return Scenario::rayleigh;
    if (tag == "rice") return Scenario::rice;
    if (tag == "nakagami_m") return Scenario::nakagami_m;
    if (tag == "one_sided_gaussian") return Scenario::one_sided_gaussian;
    if (tag == "kappa_mu") return Scenario::kappa_mu;
    return std::nullopt;
}

std::string_view scenario_tag(Scenario s) {
    switch (s) {
        case Scenario::rayleigh: return "rayleigh";
        case Scenario::rice: return "rice";
        case Scenario::nakagami_m: return "nakagami_m";
        case Scenario::one_sided_gaussian: return "one_sided_gaussian";
        case Scenario::kappa_mu: return "kappa_mu";
    }
    return "unknown";
}

KappaMuParams make_special_case(Scenario s, std::span<const double> shape, double gamma_bar) {
    auto expect = [&](std::size_t count) {
        require(shape.size() == count, std::string("make_special_case: ") +
                                           std::string(scenario_tag(s)) + " takes " +
                                           std::to_string(count) + " shape parameter(s)");
        for (double v : shape) {
            require(std::isfinite(v) && v > 0.0, "make_special_case: shape parameters must be positive");
        }
    };
    KappaMuParams out;
    switch (s) {
        case Scenario::rayleigh:
            expect(0);
            out = {kKappaEpsilon, 1.0, gamma_bar};
            break;
        case Scenario::rice:
            expect(1);
            out = {shape[0], 1.0, gamma_bar};
            break;
        case Scenario::nakagami_m:
            expect(1);
            out = {kKappaEpsilon, shape[0], gamma_bar};
            break;
        case Scenario::one_sided_gaussian:
            expect(0);
            out = {kKappaEpsilon, 0.5, gamma_bar};
            break;
        case Scenario::kappa_mu:
            expect(2);
            out = {shape[0], shape[1], gamma_bar};
            break;
    }
    out.validate();
    return out;
}

KappaMuParams make_special_case(std::string_view tag, std::span<const double> shape, double gamma_bar) {
    const auto s = parse_scenario(tag);
    require(s.has_value(), "make_special_case: unknown scenario tag '" + std::string(tag) + "'");
    return make_special_case(*s, shape, gamma_bar);
}

}  // namespace kmsec::fading
