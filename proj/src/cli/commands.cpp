#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>
#include <unistd.h>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kmsec/cli.hpp"
#include "kmsec/errors.hpp"
#include "kmsec/estimate.hpp"
#include "kmsec/montecarlo.hpp"
#include "kmsec/trace_io.hpp"

namespace kmsec::cli {
namespace {

using secrecy::EvalResult;
using secrecy::Method;
using secrecy::WiretapPair;

using Field = std::variant<double, std::int64_t, std::string, bool>;
using Record = std::vector<std::pair<std::string, Field>>;

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

std::string field_text(const Field& f) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        f);
}

void emit(std::ostream& out, const std::string& format, const Record& rec) {
    if (format == "csv") {
        for (std::size_t i = 0; i < rec.size(); ++i) out << (i ? "," : "") << rec[i].first;
        out << '\n';
        for (std::size_t i = 0; i < rec.size(); ++i) out << (i ? "," : "") << field_text(rec[i].second);
        out << '\n';
        return;
    }
    nlohmann::ordered_json j;
    j["schema"] = 1;
    for (const auto& [key, value] : rec) {
        std::visit([&](const auto& v) { j[key] = v; }, value);
    }
    out << j.dump(2) << '\n';
}

void add_pair_fields(Record& rec, const WiretapPair& pair) {
    rec.emplace_back("kappa_m", pair.main.kappa);
    rec.emplace_back("mu_m", pair.main.mu);
    rec.emplace_back("gamma_bar_m", pair.main.gamma_bar);
    rec.emplace_back("kappa_e", pair.eve.kappa);
    rec.emplace_back("mu_e", pair.eve.mu);
    rec.emplace_back("gamma_bar_e", pair.eve.gamma_bar);
    rec.emplace_back("rate_nats", pair.rate);
}

void add_eval_fields(Record& rec, const EvalResult& r) {
    rec.emplace_back("value", r.value);
    rec.emplace_back("method", std::string(secrecy::method_tag(r.method)));
    rec.emplace_back("terms", static_cast<std::int64_t>(r.terms_k) + r.terms_l);
    rec.emplace_back("terms_k", static_cast<std::int64_t>(r.terms_k));
    rec.emplace_back("terms_l", static_cast<std::int64_t>(r.terms_l));
    rec.emplace_back("est_error", r.est_error);
}

void add_mc_fields(Record& rec, const montecarlo::McEstimate& e) {
    rec.emplace_back("value", e.estimate);
    rec.emplace_back("method", std::string(secrecy::method_tag(Method::monte_carlo)));
    rec.emplace_back("std_error", e.std_error);
    rec.emplace_back("n", static_cast<std::int64_t>(e.n));
    rec.emplace_back("seed", static_cast<std::int64_t>(e.seed));
}

bool closed_form_applies(const WiretapPair& pair) {
    auto integral = [](double mu) { return mu >= 1.0 && std::floor(mu) == mu; };
    return integral(pair.main.mu) && integral(pair.eve.mu) && pair.main.kappa >= secrecy::kClosedFormKappaMin &&
           pair.eve.kappa >= secrecy::kClosedFormKappaMin;
}

EvalResult spsc_auto(const WiretapPair& pair, const specfun::SeriesControl& ctl) {
    return closed_form_applies(pair) ? secrecy::spsc_closed_form(pair) : secrecy::spsc_series(pair, ctl);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw FormatError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw FormatError("cannot move output into place: " + path);
    }
}

int cmd_spsc(const MetricOptions& o, std::ostream& out) {
    WiretapPair pair = resolve_pair(o.channel);
    specfun::SeriesControl ctl;
    ctl.abs_tol = o.abs_tol;
    Record rec;
    rec.emplace_back("command", std::string("spsc"));
    if (o.method == "mc") {
        add_mc_fields(rec, montecarlo::mc_spsc(pair, o.mc_n, o.seed));
    } else {
        EvalResult r;
        if (o.method == "auto") r = spsc_auto(pair, ctl);
        else if (o.method == "series") r = secrecy::spsc_series(pair, ctl);
        else if (o.method == "closed") r = secrecy::spsc_closed_form(pair);
        else if (o.method == "quadrature") r = secrecy::spsc_quadrature(pair);
        else throw DomainError("unknown method '" + o.method + "'");
        add_eval_fields(rec, r);
    }
    add_pair_fields(rec, pair);
    emit(out, o.format, rec);
    return kExitOk;
}

int cmd_sop(const MetricOptions& o, std::ostream& out) {
    WiretapPair pair = resolve_pair(o.channel);
    specfun::SeriesControl ctl;
    ctl.abs_tol = o.abs_tol;
    const bool lower = o.bound == "lower";
    require(lower || o.bound == "exact", "--bound must be exact or lower");
    Record rec;
    rec.emplace_back("command", std::string("sop"));
    rec.emplace_back("bound", o.bound);
    if (o.method == "mc") {
        add_mc_fields(rec, montecarlo::mc_sop(pair, o.mc_n, o.seed, lower));
    } else {
        EvalResult r;
        if (lower) {
            if (o.method == "auto" || o.method == "series") r = secrecy::sop_lower(pair, ctl);
            else if (o.method == "quadrature") r = secrecy::sop_lower_quadrature(pair);
            else throw DomainError("--bound lower supports methods auto, series, quadrature, mc");
        } else {
            if (o.method == "auto" || o.method == "quadrature") r = secrecy::sop_exact(pair);
            else throw DomainError("--bound exact supports methods auto, quadrature, mc");
        }
        add_eval_fields(rec, r);
    }
    add_pair_fields(rec, pair);
    emit(out, o.format, rec);
    return kExitOk;
}

namespace {

struct SweepRow {
    double x = 0.0;
    EvalResult spsc, sop_exact, sop_lower;
    montecarlo::McJoint mc;
};

void apply_sweep_value(WiretapPair& pair, const std::string& var, double x) {
    if (var == "gamma_bar_m_db") pair.main.gamma_bar = db_to_linear(x);
    else if (var == "gamma_bar_e_db") pair.eve.gamma_bar = db_to_linear(x);
    else if (var == "kappa_m") pair.main.kappa = x;
    else if (var == "kappa_e") pair.eve.kappa = x;
    else if (var == "mu_m") pair.main.mu = x;
    else if (var == "mu_e") pair.eve.mu = x;
    else if (var == "rate") pair.rate = x;
    else throw DomainError("unknown sweep variable '" + var + "'");
    pair.validate();
}

// +1 nondecreasing, -1 nonincreasing, 0 no stated direction.
struct Directions {
    int spsc, sop;
};

Directions sweep_directions(const std::string& var) {
    if (var == "gamma_bar_m_db") return {+1, -1};
    if (var == "gamma_bar_e_db") return {-1, +1};
    if (var == "rate") return {0, +1};
    return {0, 0};
}

}  // namespace

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
    require(o.steps >= 2, "--steps must be >= 2");
    require(o.start < o.stop, "--start must be below --stop");
    const WiretapPair base = resolve_pair(o.channel);
    const Directions dir = sweep_directions(o.variable);
    require(!o.assert_monotone || dir.spsc != 0 || dir.sop != 0,
            "--assert-monotone has no stated direction for '" + o.variable + "'");
    require(o.with_mc == 0 || o.with_mc >= montecarlo::kMinDraws,
            "--with-mc needs at least " + std::to_string(montecarlo::kMinDraws) + " draws");

    std::vector<WiretapPair> pairs(o.steps);
    std::vector<SweepRow> rows(o.steps);
    for (int i = 0; i < o.steps; ++i) {
        rows[i].x = o.start + (o.stop - o.start) * i / (o.steps - 1);
        if (i == o.steps - 1) rows[i].x = o.stop;
        pairs[i] = base;
        apply_sweep_value(pairs[i], o.variable, rows[i].x);
    }

    unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(o.steps));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    auto worker = [&](unsigned id) {
        try {
            for (int i = next++; i < o.steps; i = next++) {
                rows[i].spsc = spsc_auto(pairs[i], {});
                rows[i].sop_exact = secrecy::sop_exact(pairs[i]);
                rows[i].sop_lower = secrecy::sop_lower(pairs[i]);
                if (o.with_mc) rows[i].mc = montecarlo::mc_joint(pairs[i], o.with_mc, o.seed + i, 1);
            }
        } catch (...) {
            errors[id] = std::current_exception();
            next = o.steps;
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    if (o.assert_monotone) {
        auto check = [&](const char* name, int sign, auto get) {
            if (sign == 0) return;
            for (int i = 0; i + 1 < o.steps; ++i) {
                const EvalResult& a = get(rows[i]);
                const EvalResult& b = get(rows[i + 1]);
                const double slack = 1e-10 + a.est_error + b.est_error;
                if (sign * (b.value - a.value) < -slack) {
                    throw ValidationFailure(std::string(name) + " is not monotone between " + o.variable + " = " +
                                            format_double(rows[i].x) + " and " + format_double(rows[i + 1].x) +
                                            " (" + format_double(a.value) + " -> " + format_double(b.value) + ")");
                }
            }
        };
        check("spsc", dir.spsc, [](const SweepRow& r) -> const EvalResult& { return r.spsc; });
        check("sop_exact", dir.sop, [](const SweepRow& r) -> const EvalResult& { return r.sop_exact; });
        check("sop_lower", dir.sop, [](const SweepRow& r) -> const EvalResult& { return r.sop_lower; });
    }

    std::ostringstream csv;
    csv << o.variable << ",spsc,sop_exact,sop_lower";
    if (o.with_mc) csv << ",mc_spsc,mc_spsc_se,mc_sop_exact,mc_sop_exact_se,mc_sop_lower,mc_sop_lower_se";
    csv << '\n';
    for (const auto& r : rows) {
        csv << format_double(r.x) << ',' << format_double(r.spsc.value) << ',' << format_double(r.sop_exact.value)
            << ',' << format_double(r.sop_lower.value);
        if (o.with_mc) {
            csv << ',' << format_double(r.mc.spsc.estimate) << ',' << format_double(r.mc.spsc.std_error) << ','
                << format_double(r.mc.sop.estimate) << ',' << format_double(r.mc.sop.std_error) << ','
                << format_double(r.mc.sop_lower.estimate) << ',' << format_double(r.mc.sop_lower.std_error);
        }
        csv << '\n';
    }
    if (o.output.empty()) {
        out << csv.str();
    } else {
        write_file_atomic(o.output, csv.str());
        err << "wrote " << o.steps << " rows to " << o.output << '\n';
    }
    return kExitOk;
}

std::vector<WiretapPair> validation_grid(std::string_view name) {
    std::vector<WiretapPair> grid;
    if (name == "small") {
        grid.push_back({{4.0, 2.0, 2.0}, {2.0, 3.0, 1.0}, 0.0});
        grid.push_back({{15.0, 1.0, 1.0}, {12.0, 1.0, 1.0}, 0.0});
        grid.push_back({{1.0, 1.0, 3.0}, {2.0, 2.0, 1.0}, 0.0});
        grid.push_back({{4.0, 1.4, 2.0}, {2.0, 1.2, 1.0}, 0.0});
        return grid;
    }
    if (name == "full") {
        for (double km : {0.5, 2.0, 6.0}) {
            for (double ratio : {0.5, 2.0, 8.0}) {
                for (auto [um, ue] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {3.0, 2.0}}) {
                    grid.push_back({{km, um, ratio}, {1.5, ue, 1.0}, 0.0});
                }
            }
        }
        grid.push_back({{4.0, 1.4, 2.0}, {2.0, 1.2, 1.0}, 0.0});
        grid.push_back({{4.0, 1.4, 5.0}, {2.0, 1.2, 1.0}, 0.0});
        grid.push_back({{1.07, 0.91, 2.0}, {1.11, 0.92, 1.0}, 0.0});
        grid.push_back({{5.02, 0.70, 1.0}, {7.17, 0.60, 1.0}, 0.0});
        grid.push_back({{2.92, 0.75, 0.5}, {3.60, 0.67, 1.0}, 0.0});
        return grid;
    }
    throw DomainError("unknown grid '" + std::string(name) + "' (use small or full)");
}

int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
    const auto grid = validation_grid(o.grid);
    const double perturb = o.self_test_break ? 1e-3 : 0.0;
    const std::array<double, 3> rates = {0.0, 0.5, std::pow(10.0, 0.1)};

    struct Check {
        std::string name;
        double tolerance;
        double worst = 0.0;
        std::int64_t points = 0;
    };
    Check closed{"series_vs_closed_form", 1e-8};
    Check quad{"series_vs_quadrature", 1e-6};
    Check comp_lower{"complement_sop_lower", 1e-8};
    Check comp_exact{"complement_sop_exact", 1e-6};
    Check ordering{"bound_ordering_violation", 0.0};
    Check mc{"series_vs_mc_z", 4.0};
    Check inclusion{"mc_inclusion_violations", 0.0};

    for (std::size_t i = 0; i < grid.size(); ++i) {
        WiretapPair pair = grid[i];
        const EvalResult series = secrecy::spsc_series(pair);
        const double s = series.value + perturb;

        if (closed_form_applies(pair)) {
            closed.worst = std::max(closed.worst, std::abs(s - secrecy::spsc_closed_form(pair).value));
            ++closed.points;
        }
        quad.worst = std::max(quad.worst, std::abs(s - secrecy::spsc_quadrature(pair).value));
        ++quad.points;
        comp_lower.worst = std::max(comp_lower.worst, std::abs(secrecy::sop_lower(pair).value + s - 1.0));
        ++comp_lower.points;
        comp_exact.worst = std::max(comp_exact.worst, std::abs(secrecy::sop_exact(pair).value + s - 1.0));
        ++comp_exact.points;

        for (double rate : rates) {
            pair.rate = rate;
            const EvalResult ex = secrecy::sop_exact(pair);
            const EvalResult lo = secrecy::sop_lower(pair);
            ordering.worst = std::max(ordering.worst, lo.value - ex.value - ex.est_error - lo.est_error);
            ++ordering.points;
            const auto joint = montecarlo::mc_joint(pair, o.mc_n, o.seed + i, 1);
            inclusion.worst = std::max(inclusion.worst, static_cast<double>(joint.inclusion_violations));
            ++inclusion.points;
            if (rate == 0.0) {
                const double se = std::max(joint.spsc.std_error, 1.0 / static_cast<double>(o.mc_n));
                mc.worst = std::max(mc.worst, std::abs(joint.spsc.estimate - s) / se);
                ++mc.points;
            }
        }
    }

    nlohmann::ordered_json report;
    report["schema"] = 1;
    report["command"] = "validate";
    report["grid"] = o.grid;
    report["points"] = grid.size();
    report["mc_n"] = o.mc_n;
    report["seed"] = o.seed;
    report["self_test_break"] = o.self_test_break;
    bool all_pass = true;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const Check* c : {&closed, &quad, &comp_lower, &comp_exact, &ordering, &mc, &inclusion}) {
        const double worst = std::max(c->worst, 0.0);
        const bool pass = worst <= c->tolerance;
        all_pass = all_pass && pass;
        checks.push_back({{"name", c->name},
                          {"max_abs_diff", worst},
                          {"tolerance", c->tolerance},
                          {"points", c->points},
                          {"pass", pass}});
    }
    report["checks"] = checks;
    report["pass"] = all_pass;
    out << report.dump(2) << '\n';
    if (!all_pass) {
        err << "validate: one or more checks exceeded their tolerance\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_fit(const FitCommandOptions& o, std::ostream& out) {
    require(o.input_kind == "envelope" || o.input_kind == "power", "--input-kind must be envelope or power");
    estimate::EnvelopeTrace trace = trace_io::read_trace(o.input);
    if (o.input_kind == "power") trace = estimate::power_to_envelope(trace);
    if (o.window > 0) trace = estimate::local_mean_normalize(trace, o.window);

    estimate::FitOptions fopts;
    fopts.bin_width = o.bin_width;
    const estimate::FitResult fit = estimate::fit_kappa_mu(trace, fopts);

    if (!o.emit_pdf_grid.empty()) {
        std::vector<double> scaled(trace.samples.size());
        std::transform(trace.samples.begin(), trace.samples.end(), scaled.begin(),
                       [&](double v) { return v / fit.r_hat; });
        const estimate::Histogram h = estimate::density_histogram(scaled, o.bin_width);
        std::ostringstream csv;
        csv << "envelope,empirical_density,fitted_density\n";
        for (std::size_t i = 0; i < h.density.size(); ++i) {
            const double r = h.center(i) * fit.r_hat;
            csv << format_double(r) << ',' << format_double(h.density[i] / fit.r_hat) << ','
                << format_double(fading::envelope_pdf(fit.kappa_hat, fit.mu_hat, fit.r_hat, r)) << '\n';
        }
        write_file_atomic(o.emit_pdf_grid, csv.str());
    }

    Record rec;
    rec.emplace_back("command", std::string("fit"));
    rec.emplace_back("kappa_hat", fit.kappa_hat);
    rec.emplace_back("mu_hat", fit.mu_hat);
    rec.emplace_back("r_hat", fit.r_hat);
    rec.emplace_back("residual", fit.residual);
    rec.emplace_back("iterations", static_cast<std::int64_t>(fit.iterations));
    rec.emplace_back("start_index", static_cast<std::int64_t>(fit.start_index));
    rec.emplace_back("n", static_cast<std::int64_t>(trace.samples.size()));
    rec.emplace_back("window", static_cast<std::int64_t>(o.window));
    rec.emplace_back("input_kind", o.input_kind);
    emit(out, o.format, rec);
    return kExitOk;
}

int cmd_synth_trace(const SynthOptions& o, std::ostream& out) {
    require(o.format == "csv" || o.format == "binary", "--format must be csv or binary");
    require(o.kind == "envelope" || o.kind == "power", "--kind must be envelope or power");
    require(o.shadow_period > 0.0, "--shadow-period must be > 0");
    estimate::EnvelopeTrace trace = estimate::synthetic_envelope(o.kappa, o.mu, o.r_hat, o.n, o.seed);
    if (o.shadow_db != 0.0) {
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / o.shadow_period;
            trace.samples[i] *= std::pow(10.0, o.shadow_db * std::sin(phase) / 20.0);
        }
    }
    if (o.kind == "power") {
        for (double& v : trace.samples) v *= v;
    }
    std::ostringstream buf;
    if (o.format == "csv") trace_io::write_csv(buf, trace);
    else trace_io::write_binary(buf, trace);
    if (o.output.empty()) out << buf.str();
    else write_file_atomic(o.output, buf.str());
    return kExitOk;
}

}  // namespace kmsec::cli
