#include "kmsec/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kmsec/errors.hpp"
#include "kmsec/fading.hpp"

namespace kmsec::estimate {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMinFitSamples = 1000;
constexpr std::size_t kMaxBins = 2000;

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= s.size()) return s.back();
    const double frac = pos - static_cast<double>(i);
    return s[i] + frac * (s[i + 1] - s[i]);
}

struct Objective {
    const Histogram& hist;
    double log_kappa_min, log_kappa_max, log_mu_min, log_mu_max;

    std::array<double, 2> clamp(std::array<double, 2> u) const {
        u[0] = std::clamp(u[0], log_kappa_min, log_kappa_max);
        u[1] = std::clamp(u[1], log_mu_min, log_mu_max);
        return u;
    }

    double operator()(const std::array<double, 2>& u) const {
        return residual(std::exp(u[0]), std::exp(u[1]));
    }

    double residual(double kappa, double mu) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < hist.density.size(); ++i) {
            const double model = fading::envelope_pdf(kappa, mu, 1.0, hist.center(i));
            const double d = hist.density[i] - model;
            sum += d * d;
        }
        return std::isfinite(sum) ? sum : kInf;
    }
};

struct SimplexRun {
    std::array<double, 2> best{};
    double f = kInf;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

// Nelder-Mead on a box: every trial point is projected onto the bounds.
SimplexRun nelder_mead(const Objective& obj, std::array<double, 2> start, const FitOptions& opts) {
    using Point = std::array<double, 2>;
    constexpr double kStep = 0.5;
    std::array<Point, 3> x = {obj.clamp(start), obj.clamp({start[0] + kStep, start[1]}),
                              obj.clamp({start[0], start[1] + kStep})};
    std::array<double, 3> f{};
    for (int i = 0; i < 3; ++i) f[i] = obj(x[i]);

    auto lerp = [&](const Point& a, const Point& b, double t) {
        return obj.clamp({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    };

    SimplexRun run;
    for (int it = 0; it < opts.max_iterations; ++it) {
        std::array<int, 3> idx = {0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
        const int lo = idx[0], mid = idx[1], hi = idx[2];

        double spread_x = 0.0;
        for (int i : {mid, hi}) {
            spread_x = std::max({spread_x, std::abs(x[i][0] - x[lo][0]), std::abs(x[i][1] - x[lo][1])});
        }
        if (f[hi] - f[lo] <= opts.f_tol * std::abs(f[lo]) + 1e-300 && spread_x <= opts.x_tol) {
            run.converged = true;
            break;
        }

        const Point centroid = {(x[lo][0] + x[mid][0]) / 2.0, (x[lo][1] + x[mid][1]) / 2.0};
        const Point xr = lerp(centroid, x[hi], -1.0);
        const double fr = obj(xr);
        if (fr < f[lo]) {
            const Point xe = lerp(centroid, x[hi], -2.0);
            const double fe = obj(xe);
            if (fe < fr) {
                x[hi] = xe;
                f[hi] = fe;
            } else {
                x[hi] = xr;
                f[hi] = fr;
            }
        } else if (fr < f[mid]) {
            x[hi] = xr;
            f[hi] = fr;
        } else {
            const bool outside = fr < f[hi];
            const Point xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, x[hi], 0.5);
            const double fc = obj(xc);
            if (fc < std::min(fr, f[hi])) {
                x[hi] = xc;
                f[hi] = fc;
            } else {
                for (int i : {mid, hi}) {
                    x[i] = lerp(x[lo], x[i], 0.5);
                    f[i] = obj(x[i]);
                }
            }
        }
        run.iterations = it + 1;
        run.history.push_back(*std::min_element(f.begin(), f.end()));
    }
    const auto best = std::min_element(f.begin(), f.end()) - f.begin();
    run.best = x[best];
    run.f = f[best];
    return run;
}

}  // namespace

void EnvelopeTrace::validate() const {
    for (double v : samples) require(std::isfinite(v) && v >= 0.0, "trace samples must be finite and >= 0");
    if (sample_rate_hz) require(*sample_rate_hz > 0.0, "sample rate must be > 0");
}

EnvelopeTrace local_mean_normalize(const EnvelopeTrace& trace, std::size_t window) {
    trace.validate();
    require(window >= 1 && window % 2 == 1, "smoothing window must be odd and >= 1");
    const std::size_t n = trace.samples.size();
    require(n >= window, "trace is shorter than the smoothing window");

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + trace.samples[i];

    EnvelopeTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(n);
    const std::size_t half = window / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        // A one-sample window is the sample itself; prefix differences would add rounding.
        const double mean = h == 0 ? trace.samples[i]
                                   : (prefix[i + h + 1] - prefix[i - h]) / static_cast<double>(2 * h + 1);
        require(mean > 0.0, "local mean is zero at sample " + std::to_string(i));
        out.samples[i] = trace.samples[i] / mean;
    }
    return out;
}

EnvelopeTrace power_to_envelope(const EnvelopeTrace& trace) {
    trace.validate();
    EnvelopeTrace out = trace;
    for (double& v : out.samples) v = std::sqrt(v);
    return out;
}

Histogram density_histogram(const std::vector<double>& x, std::optional<double> bin_width) {
    require(x.size() >= 2, "histogram needs at least two samples");
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    const double range = s.back() - s.front();
    require(range > 0.0, "degenerate histogram: all samples are equal");

    double width = 0.0;
    if (bin_width) {
        require(*bin_width > 0.0, "bin width must be > 0");
        width = *bin_width;
    } else {
        const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
        require(iqr > 0.0, "degenerate histogram: zero interquartile range");
        width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(s.size()));
    }
    auto bins = static_cast<std::size_t>(std::ceil(range / width));
    bins = std::max<std::size_t>(bins, 1);
    if (bins > kMaxBins) {
        bins = kMaxBins;
        width = range / static_cast<double>(bins);
    }

    Histogram h;
    h.lo = s.front();
    h.width = width;
    h.density.assign(bins, 0.0);
    for (double v : s) {
        auto i = static_cast<std::size_t>((v - h.lo) / width);
        h.density[std::min(i, bins - 1)] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(s.size()) * width);
    for (double& d : h.density) d *= norm;
    return h;
}

namespace {

struct Prepared {
    double r_hat;
    Histogram hist;
};

Prepared prepare(const EnvelopeTrace& trace, const FitOptions& opts) {
    trace.validate();
    require(trace.samples.size() >= kMinFitSamples,
            "fitting needs at least " + std::to_string(kMinFitSamples) + " samples");
    double sum_sq = 0.0;
    for (double v : trace.samples) sum_sq += v * v;
    const double r_hat = std::sqrt(sum_sq / static_cast<double>(trace.samples.size()));
    require(r_hat > 0.0, "degenerate histogram: trace is identically zero");
    std::vector<double> scaled(trace.samples.size());
    std::transform(trace.samples.begin(), trace.samples.end(), scaled.begin(),
                   [&](double v) { return v / r_hat; });
    return {r_hat, density_histogram(scaled, opts.bin_width)};
}

}  // namespace

double fit_residual(const EnvelopeTrace& trace, double kappa, double mu, const FitOptions& opts) {
    const Prepared p = prepare(trace, opts);
    const Objective obj{p.hist, 0, 0, 0, 0};
    return obj.residual(kappa, mu);
}

FitResult fit_kappa_mu(const EnvelopeTrace& trace, const FitOptions& opts) {
    require(opts.kappa_min > 0.0 && opts.kappa_min < opts.kappa_max, "bad kappa bounds");
    require(opts.mu_min > 0.0 && opts.mu_min < opts.mu_max, "bad mu bounds");
    require(opts.max_iterations >= 1, "max_iterations must be >= 1");
    const Prepared p = prepare(trace, opts);
    const Objective obj{p.hist, std::log(opts.kappa_min), std::log(opts.kappa_max), std::log(opts.mu_min),
                        std::log(opts.mu_max)};

    constexpr std::array<double, 3> kKappaStarts = {0.1, 1.0, 5.0};
    constexpr std::array<double, 3> kMuStarts = {0.5, 1.0, 2.0};

    FitResult best;
    best.residual = kInf;
    bool any_converged = false;
    int index = 0;
    for (double k0 : kKappaStarts) {
        for (double m0 : kMuStarts) {
            SimplexRun run = nelder_mead(obj, {std::log(k0), std::log(m0)}, opts);
            any_converged = any_converged || run.converged;
            if (run.f < best.residual) {
                best.kappa_hat = std::exp(run.best[0]);
                best.mu_hat = std::exp(run.best[1]);
                best.residual = run.f;
                best.iterations = run.iterations;
                best.start_index = index;
                best.residual_history = std::move(run.history);
            }
            ++index;
        }
    }
    if (!any_converged || !std::isfinite(best.residual)) {
        throw ConvergenceError("fit_kappa_mu: no start converged within " +
                               std::to_string(opts.max_iterations) + " iterations");
    }
    best.r_hat = p.r_hat;
    return best;
}

EnvelopeTrace synthetic_envelope(double kappa, double mu, double r_hat, std::size_t n, std::uint64_t seed) {
    require(std::isfinite(r_hat) && r_hat > 0.0, "r_hat must be > 0");
    const auto snr = fading::sample_snr({kappa, mu, 1.0}, n, seed);
    EnvelopeTrace out;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = r_hat * std::sqrt(snr[i]);
    return out;
}

}  // namespace kmsec::estimate
