#include "kmsec/cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "kmsec/errors.hpp"

namespace kmsec::cli {
namespace {

void add_metric_options(CLI::App& sub, MetricOptions& o, bool is_sop) {
    add_channel_options(sub, o.channel, is_sop);
    const std::vector<std::string> methods =
        is_sop ? std::vector<std::string>{"auto", "series", "quadrature", "mc"}
               : std::vector<std::string>{"auto", "series", "closed", "quadrature", "mc"};
    sub.add_option("--method", o.method, "Evaluation method")->check(CLI::IsMember(methods));
    sub.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub.add_option("--mc-n", o.mc_n, "Monte Carlo draws for --method mc")->check(CLI::Range(1000ul, 1ul << 40));
    sub.add_option("--seed", o.seed, "Monte Carlo seed");
    sub.add_option("--abs-tol", o.abs_tol, "Series absolute tolerance")->check(CLI::PositiveNumber);
    if (is_sop) {
        sub.add_option("--bound", o.bound, "exact or lower")->check(CLI::IsMember({"exact", "lower"}));
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Secrecy metrics for wiretap channels with kappa-mu fading", "kmsec"};
    app.require_subcommand(1);

    MetricOptions spsc_opts;
    auto* spsc = app.add_subcommand("spsc", "Probability of strictly positive secrecy capacity");
    add_metric_options(*spsc, spsc_opts, false);

    MetricOptions sop_opts;
    auto* sop = app.add_subcommand("sop", "Secure outage probability (exact or lower bound)");
    add_metric_options(*sop, sop_opts, true);

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "Evaluate all metrics over a one-parameter grid (CSV)");
    add_channel_options(*sweep, sweep_opts.channel, true);
    sweep->add_option("--var", sweep_opts.variable, "Swept variable")
        ->required()
        ->check(CLI::IsMember(
            {"gamma_bar_m_db", "gamma_bar_e_db", "kappa_m", "kappa_e", "mu_m", "mu_e", "rate"}));
    sweep->add_option("--start", sweep_opts.start, "First grid value")->required();
    sweep->add_option("--stop", sweep_opts.stop, "Last grid value")->required();
    sweep->add_option("--steps", sweep_opts.steps, "Number of grid points (>= 2)")->required();
    sweep->add_option("--with-mc", sweep_opts.with_mc, "Add Monte Carlo columns with this many draws");
    sweep->add_option("--seed", sweep_opts.seed, "Monte Carlo seed (row i uses seed + i)");
    sweep->add_flag("--assert-monotone", sweep_opts.assert_monotone,
                    "Fail with exit 4 unless every metric moves in its expected direction");
    sweep->add_option("--output", sweep_opts.output, "Write the CSV here instead of stdout");
    sweep->add_option("--threads", sweep_opts.threads, "Worker threads (0 = hardware concurrency)");

    ValidateOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "Cross-check series, closed form, quadrature and Monte Carlo");
    validate->add_option("--grid", validate_opts.grid, "small or full")->check(CLI::IsMember({"small", "full"}));
    validate->add_option("--mc-n", validate_opts.mc_n, "Monte Carlo draws per point")
        ->check(CLI::Range(1000ul, 1ul << 40));
    validate->add_option("--seed", validate_opts.seed, "Monte Carlo seed");
    validate->add_flag("--self-test-break", validate_opts.self_test_break,
                       "Perturb the series values to check that validation fails");

    FitCommandOptions fit_opts;
    auto* fit = app.add_subcommand("fit", "Fit kappa and mu to an envelope trace");
    fit->add_option("--input", fit_opts.input, "Trace file (CSV or KMUTRC01 binary)")->required();
    fit->add_option("--window", fit_opts.window, "Local-mean window in samples, odd; 0 disables");
    fit->add_option("--input-kind", fit_opts.input_kind, "envelope or power")
        ->check(CLI::IsMember({"envelope", "power"}));
    fit->add_option_function<double>(
           "--bin-width", [&](const double& w) { fit_opts.bin_width = w; },
           "Histogram bin width in RMS units (default Freedman-Diaconis)")
        ->check(CLI::PositiveNumber);
    fit->add_option("--emit-pdf-grid", fit_opts.emit_pdf_grid, "Write envelope/empirical/fitted density CSV");
    fit->add_option("--format", fit_opts.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("synth-trace", "Write a synthetic kappa-mu envelope trace");
    synth->add_option("--kappa", synth_opts.kappa, "kappa")->required();
    synth->add_option("--mu", synth_opts.mu, "mu")->required();
    synth->add_option("--r-hat", synth_opts.r_hat, "RMS envelope level");
    synth->add_option("--n", synth_opts.n, "Number of samples");
    synth->add_option("--seed", synth_opts.seed, "Seed");
    synth->add_option("--output", synth_opts.output, "Output file (stdout if omitted)");
    synth->add_option("--format", synth_opts.format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
    synth->add_option("--kind", synth_opts.kind, "envelope or power")->check(CLI::IsMember({"envelope", "power"}));
    synth->add_option("--shadow-db", synth_opts.shadow_db, "Peak sinusoidal shadowing, dB");
    synth->add_option("--shadow-period", synth_opts.shadow_period, "Shadowing period, samples");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*spsc) return cmd_spsc(spsc_opts, out);
        if (*sop) return cmd_sop(sop_opts, out);
        if (*sweep) return cmd_sweep(sweep_opts, out, err);
        if (*validate) return cmd_validate(validate_opts, out, err);
        if (*fit) return cmd_fit(fit_opts, out);
        if (*synth) return cmd_synth_trace(synth_opts, out);
    } catch (const ValidationFailure& e) {
        err << "validation failed: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "bad input file: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace kmsec::cli
