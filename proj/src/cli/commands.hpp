#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "channel_args.hpp"

namespace kmsec::cli {

// A requested check failed; maps to kExitValidation.
class ValidationFailure : public std::runtime_error {
public:
    explicit ValidationFailure(const std::string& what) : std::runtime_error(what) {}
};

struct MetricOptions {
    ChannelOptions channel;
    std::string method = "auto";
    std::string format = "json";
    std::string bound = "exact";  // sop only
    std::size_t mc_n = 1'000'000;
    std::uint64_t seed = 1;
    double abs_tol = 1e-12;
};

struct SweepOptions {
    ChannelOptions channel;
    std::string variable;
    double start = 0.0, stop = 0.0;
    int steps = 0;
    std::size_t with_mc = 0;
    std::uint64_t seed = 1;
    bool assert_monotone = false;
    std::string output;
    unsigned threads = 0;
};

struct ValidateOptions {
    std::string grid = "small";
    std::size_t mc_n = 200'000;
    std::uint64_t seed = 1;
    bool self_test_break = false;
};

struct FitCommandOptions {
    std::string input;
    std::size_t window = 0;  // 0 = no local-mean normalization
    std::string input_kind = "envelope";
    std::optional<double> bin_width;
    std::string emit_pdf_grid;
    std::string format = "json";
};

struct SynthOptions {
    double kappa = 1.0, mu = 1.0, r_hat = 1.0;
    std::size_t n = 100'000;
    std::uint64_t seed = 1;
    std::string output;
    std::string format = "csv";
    std::string kind = "envelope";
    double shadow_db = 0.0;        // peak deviation of the sinusoidal shadowing
    double shadow_period = 5000.0;  // in samples
};

int cmd_spsc(const MetricOptions& o, std::ostream& out);
int cmd_sop(const MetricOptions& o, std::ostream& out);
int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err);
int cmd_fit(const FitCommandOptions& o, std::ostream& out);
int cmd_synth_trace(const SynthOptions& o, std::ostream& out);

// Writes `content` to `path` through a temporary file in the same directory
// and a rename, so a failed run never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace kmsec::cli
