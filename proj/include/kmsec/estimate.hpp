#pragma once

// Envelope-trace processing: local-mean normalization and least-squares
// fitting of the kappa-mu envelope density to a histogram.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace kmsec::estimate {

struct EnvelopeTrace {
    std::vector<double> samples;  // envelope values, >= 0
    std::optional<double> sample_rate_hz;

    // Throws DomainError on negative or non-finite samples.
    void validate() const;
};

// Each sample divided by the centered moving average of `window` samples
// (window odd, >= 1). The window shrinks symmetrically near the ends.
EnvelopeTrace local_mean_normalize(const EnvelopeTrace& trace, std::size_t window);

// Square root of every sample, for traces recorded as received power.
EnvelopeTrace power_to_envelope(const EnvelopeTrace& trace);

struct Histogram {
    double lo = 0.0;
    double width = 0.0;
    std::vector<double> density;  // integrates to 1 over [lo, lo + width * size]

    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
};

// Density histogram. The default bin width is Freedman-Diaconis,
// 2 IQR n^(-1/3). Throws DomainError if the data have zero spread.
Histogram density_histogram(const std::vector<double>& x, std::optional<double> bin_width = std::nullopt);

struct FitOptions {
    std::optional<double> bin_width;  // in units of the RMS level
    int max_iterations = 2000;        // per start
    double f_tol = 1e-12;
    double x_tol = 1e-8;
    double kappa_min = 1e-6, kappa_max = 50.0;
    double mu_min = 0.05, mu_max = 10.0;
};

struct FitResult {
    double kappa_hat = 0.0;
    double mu_hat = 0.0;
    double r_hat = 0.0;
    double residual = 0.0;  // sum of squared density errors, RMS-normalized units
    int iterations = 0;
    int start_index = 0;  // winning multi-start, 0..8
    // Best residual after each iteration of the winning start.
    std::vector<double> residual_history;
};

// Fixes r_hat to the sample RMS, builds a density histogram of r / r_hat and
// minimises the squared density error over (kappa, mu) with Nelder-Mead in
// log coordinates from the nine starts kappa in {0.1, 1, 5} x mu in {0.5, 1, 2}.
// Needs at least 1000 samples.
FitResult fit_kappa_mu(const EnvelopeTrace& trace, const FitOptions& opts = {});

// Squared density error of a given (kappa, mu) against the trace histogram,
// in the same units as FitResult::residual.
double fit_residual(const EnvelopeTrace& trace, double kappa, double mu, const FitOptions& opts = {});

// Envelope draws with RMS level r_hat.
EnvelopeTrace synthetic_envelope(double kappa, double mu, double r_hat, std::size_t n, std::uint64_t seed);

}  // namespace kmsec::estimate
