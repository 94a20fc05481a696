// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Seeds are fixed here in advance; nothing is retried.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "kmsec/cli.hpp"
#include "kmsec/estimate.hpp"
#include "kmsec/fading.hpp"
#include "kmsec/montecarlo.hpp"
#include "kmsec/quadrature.hpp"
#include "kmsec/secrecy.hpp"
#include "kmsec/specfun.hpp"

using namespace kmsec;
using fading::KappaMuParams;
using secrecy::WiretapPair;

namespace {

constexpr double kEps = fading::kKappaEpsilon;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool is_integer_mu(const WiretapPair& p) {
    return std::floor(p.main.mu) == p.main.mu && std::floor(p.eve.mu) == p.eve.mu;
}

// 1. Rayleigh/Rayleigh against gbar_M / (gbar_M + gbar_E).
void rayleigh_reduction() {
    Stopwatch sw;
    double worst = 0.0;
    for (double ratio : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const WiretapPair p{{kEps, 1.0, ratio}, {kEps, 1.0, 1.0}, 0.0};
        worst = std::max(worst, std::abs(secrecy::spsc_series(p).value - secrecy::spsc_rayleigh_reference(ratio, 1.0)));
    }
    const double t = sw.seconds();
    report(1, "rayleigh reduction", worst <= 1e-6 && t < 1.0,
           fmt("max |diff| = %.3g (tol 1e-6)", worst) + fmt(", %.3f s (limit 1 s)", t));
}

// 2. Rice/Rice, K_M = 15, K_E = 12.
void rice_reduction() {
    Stopwatch sw;
    double worst_series = 0.0, worst_closed = 0.0;
    for (double ratio : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const WiretapPair p{{15.0, 1.0, ratio}, {12.0, 1.0, 1.0}, 0.0};
        const double ref = secrecy::spsc_rice_reference(15.0, 12.0, ratio, 1.0);
        worst_series = std::max(worst_series, std::abs(secrecy::spsc_series(p).value - ref));
        worst_closed = std::max(worst_closed, std::abs(secrecy::spsc_closed_form(p).value - ref));
    }
    const double t = sw.seconds();
    report(2, "rice reduction", std::max(worst_series, worst_closed) <= 1e-8 && t < 5.0,
           fmt("series %.3g", worst_series) + fmt(", closed form %.3g (tol 1e-8)", worst_closed) +
               fmt(", %.2f s (limit 5 s)", t));
}

// 3. Series vs closed form vs 10^7-draw Monte Carlo on the integer-mu grid.
void oracle_triangle() {
    Stopwatch sw;
    const std::size_t n = 10'000'000;
    std::vector<WiretapPair> grid;
    for (const auto& p : cli::validation_grid("full")) {
        if (is_integer_mu(p)) grid.push_back(p);
    }
    double worst_diff = 0.0, worst_z = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = secrecy::spsc_series(grid[i]).value;
        const double c = secrecy::spsc_closed_form(grid[i]).value;
        const auto mc = montecarlo::mc_spsc(grid[i], n, 2024 + i);
        worst_diff = std::max(worst_diff, std::abs(s - c));
        const double se = std::max(mc.std_error, 1.0 / static_cast<double>(n));
        worst_z = std::max({worst_z, std::abs(mc.estimate - s) / se, std::abs(mc.estimate - c) / se});
    }
    const double t = sw.seconds();
    report(3, "oracle triangle",
           grid.size() >= 27 && worst_diff <= 1e-8 && worst_z <= 3.0 && t < 300.0,
           std::to_string(grid.size()) + " configs" + fmt(", max |series-closed| = %.3g (tol 1e-8)", worst_diff) +
               fmt(", max |MC-analytic|/SE = %.2f (tol 3)", worst_z) + fmt(", %.1f s (limit 300 s)", t));
}

// 4. sop_lower(R = 0) + spsc = 1 on the full grid.
void complement_identity() {
    double worst = 0.0, worst_exact = 0.0;
    const auto grid = cli::validation_grid("full");
    for (const auto& p : grid) {
        const double s = secrecy::spsc_series(p).value;
        worst = std::max(worst, std::abs(secrecy::sop_lower(p).value + s - 1.0));
        worst_exact = std::max(worst_exact, std::abs(secrecy::sop_exact(p).value + s - 1.0));
    }
    report(4, "complement identity", worst <= 1e-8,
           std::to_string(grid.size()) + " pairs" + fmt(", max |SOP_L + SPSC - 1| = %.3g (tol 1e-8)", worst) +
               fmt("; exact SOP by quadrature: %.3g", worst_exact));
}

// 5. sop_exact >= sop_lower, and shared-draw Monte Carlo event inclusion.
void bound_ordering() {
    const auto grid = cli::validation_grid("full");
    double worst = -1.0;
    std::size_t violations = 0, points = 0, inclusion = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rates[] = {0.0, 0.5, 1.2589};
        for (std::size_t j = 0; j < 3; ++j) {
            WiretapPair p = grid[i];
            p.rate = rates[j];
            const auto ex = secrecy::sop_exact(p);
            const auto lo = secrecy::sop_lower(p);
            const double excess = lo.value - ex.value - ex.est_error - lo.est_error - 1e-10;
            worst = std::max(worst, lo.value - ex.value);
            violations += excess > 0.0;
            ++points;
            inclusion += montecarlo::mc_joint(p, 1'000'000, 5000 + 3 * i + j, 0)
                             .inclusion_violations;
        }
    }
    report(5, "bound ordering", violations == 0 && inclusion == 0,
           std::to_string(points) + " points, " + std::to_string(violations) + " ordering violations" +
               fmt(" (max SOP_L - SOP = %.3g)", worst) + ", " + std::to_string(inclusion) +
               " MC inclusion violations over 10^6 shared draws per point");
}

std::vector<std::vector<double>> parse_csv_body(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) {
            double v = 0.0;
            std::from_chars(f.data(), f.data() + f.size(), v);
            row.push_back(v);
        }
        rows.push_back(row);
    }
    return rows;
}

// 6. Figure-preset sweeps over gbar_M in [-10, 30] dB, 41 points.
void monotone_sweeps() {
    bool pass = true;
    std::string detail;
    double raw_worst = 0.0;
    for (const char* preset : {"fig2-rice", "fig2-nakagami", "fig2-rayleigh", "fig4"}) {
        std::ostringstream out, err;
        const int code = cli::run({"sweep", "--preset", preset, "--var", "gamma_bar_m_db", "--start", "-10", "--stop",
                                   "30", "--steps", "41", "--assert-monotone"},
                                  out, err);
        pass = pass && code == 0;
        detail += std::string(preset) + (code == 0 ? " ok; " : " exit " + std::to_string(code) + "; ");
        if (code != 0) continue;
        const auto rows = parse_csv_body(out.str());
        pass = pass && rows.size() == 41;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            raw_worst = std::max(raw_worst, rows[i][1] - rows[i + 1][1]);  // spsc up
            raw_worst = std::max(raw_worst, rows[i + 1][2] - rows[i][2]);  // sop down
            raw_worst = std::max(raw_worst, rows[i + 1][3] - rows[i][3]);  // sop_lower down
        }
    }
    report(6, "monotone sweeps", pass, detail + fmt("largest step against the stated direction %.3g", raw_worst));
}

double ks_statistic(std::vector<double> x, const KappaMuParams& p) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = fading::snr_cdf(p, x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

// 7. KS of sample_snr against snr_cdf at the 5% level, n = 10^6.
void sampler_ks() {
    Stopwatch sw;
    const std::size_t n = 1'000'000;
    const double crit = 1.358 / std::sqrt(static_cast<double>(n));
    const std::vector<KappaMuParams> sets = {{2.0, 2.0, 1.0},  {1.07, 0.91, 1.0}, {2.92, 0.75, 1.0},
                                             {3.60, 0.67, 1.0}, {5.02, 0.70, 1.0}, {7.17, 0.60, 1.0}};
    bool pass = true;
    std::string detail = "D*sqrt(n):";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const double d = ks_statistic(fading::sample_snr(sets[i], n, 7000 + i), sets[i]);
        pass = pass && d < crit;
        detail += fmt(" %.3f", d * std::sqrt(static_cast<double>(n)));
    }
    const double t = sw.seconds();
    report(7, "sampler KS", pass && t < 60.0, detail + " (crit 1.358)" + fmt(", %.1f s (limit 60 s)", t));
}

// 8. Special-function kernel.
void special_functions() {
    using namespace specfun;
    double marcum = 0.0;
    for (double m : {0.5, 1.0, 1.4, 2.0, 3.5}) {
        for (double a : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            for (double b : {0.0, 0.5, 1.0, 2.0, 4.0}) {
                marcum = std::max(marcum, std::abs(marcum_q(m, a, b) - marcum_q_reference(m, a, b)));
            }
        }
    }
    double hyp = 0.0;
    for (double b : {0.5, 2.0, 7.0}) {
        for (double z : {0.1, 0.5, 0.9}) hyp = std::max(hyp, std::abs(gauss_2f1(1.0, b, b, z) - 1.0 / (1.0 - z)));
    }
    double closure = 0.0;
    for (double s : {0.5, 1.0, 2.5, 7.0}) {
        for (double x : {0.1, 1.0, 3.0, 10.0}) {
            auto f = [s](double u) { return std::exp(-std::pow(u, 1.0 / s)) / s; };
            const double lower = quad::integrate(f, 0.0, std::pow(x, s), {1e-14, 1e-15, 4000}).value;
            closure = std::max(closure, std::abs(upper_incomplete_gamma(s, x) + lower - std::exp(log_gamma(s))));
        }
    }
    report(8, "special functions", marcum <= 1e-8 && hyp <= 1e-12 && closure <= 1e-10,
           fmt("Marcum Q 125-point max |diff| = %.3g (tol 1e-8)", marcum) +
               fmt(", 2F1(1,b;b;z) %.3g (tol 1e-12)", hyp) + fmt(", incomplete gamma closure %.3g (tol 1e-10)", closure));
}

// 9. Fit recovery for the three measured main-channel triples.
void fit_recovery() {
    Stopwatch sw;
    struct Truth {
        const char* name;
        double kappa, mu, r_hat;
    };
    const Truth truths[] = {{"D2D", 1.07, 0.91, 1.22}, {"on-body", 2.92, 0.75, 1.17}, {"V2V", 5.02, 0.70, 1.04}};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < 3; ++i) {
        const Truth& t = truths[i];
        const auto fit = estimate::fit_kappa_mu(estimate::synthetic_envelope(t.kappa, t.mu, t.r_hat, 100000, 9000 + i));
        const double ek = std::abs(fit.kappa_hat / t.kappa - 1.0);
        const double em = std::abs(fit.mu_hat / t.mu - 1.0);
        pass = pass && ek <= 0.15 && em <= 0.15;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s kappa %.3f (%+.1f%%) mu %.3f (%+.1f%%); ", t.name, fit.kappa_hat,
                      100.0 * (fit.kappa_hat / t.kappa - 1.0), fit.mu_hat, 100.0 * (fit.mu_hat / t.mu - 1.0));
        detail += buf;
    }
    const double t = sw.seconds();
    report(9, "fit recovery", pass && t < 120.0, detail + "tol 15%" + fmt(", %.1f s (limit 120 s)", t));
}

// 10. Identical channels give SPSC = 1/2.
void symmetry() {
    double worst = 0.0;
    const std::vector<KappaMuParams> triples = {
        {5.02, 0.70, 1.0}, {1.07, 0.91, 2.0}, {15.0, 1.0, 0.5}, {kEps, 2.0, 3.0}, {3.60, 0.67, 10.0}};
    for (const auto& t : triples) worst = std::max(worst, std::abs(secrecy::spsc_series({t, t, 0.0}).value - 0.5));
    report(10, "symmetry", worst <= 1e-6, fmt("5 triples, max |SPSC - 0.5| = %.3g (tol 1e-6)", worst));
}

}  // namespace

int main() {
    Stopwatch total;
    const std::vector<void (*)()> criteria = {rayleigh_reduction, rice_reduction, oracle_triangle, complement_identity,
                                              bound_ordering,     monotone_sweeps, sampler_ks,      special_functions,
                                              fit_recovery,       symmetry};
    for (auto c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion raised: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d of %zu criteria failed, %.1f s total\n", failures, criteria.size(), total.seconds());
    return failures == 0 ? 0 : 1;
}
