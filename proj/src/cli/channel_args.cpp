#include "channel_args.hpp"

#include <cmath>
#include <numbers>

#include "kmsec/cli.hpp"
#include "kmsec/errors.hpp"

namespace kmsec::cli {
namespace {

constexpr double kEps = fading::kKappaEpsilon;

template <typename T>
void set_optional(CLI::App& app, const std::string& name, std::optional<T>& slot, const std::string& help) {
    app.add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace

const std::vector<Preset>& presets() {
    // fig4 reads "R_S = 1 dB" as 10^(1/10) nats.
    static const std::vector<Preset> table = {
        {"fig2-rice", 15.0, 1.0, 12.0, 1.0, 0.0},
        {"fig2-nakagami", kEps, 2.0, kEps, 2.0, 0.0},
        {"fig2-rayleigh", kEps, 1.0, kEps, 1.0, 0.0},
        {"rayleigh", kEps, 1.0, kEps, 1.0, 0.0},
        {"one_sided_gaussian", kEps, 0.5, kEps, 0.5, 0.0},
        {"fig4", 4.0, 1.4, 2.0, 1.2, std::pow(10.0, 0.1)},
        {"d2d", 1.07, 0.91, 1.11, 0.92, 0.0},
        {"ban", 2.92, 0.75, 3.60, 0.67, 0.0},
        {"v2v", 5.02, 0.70, 7.17, 0.60, 0.0},
    };
    return table;
}

const Preset* find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void add_channel_options(CLI::App& app, ChannelOptions& o, bool with_rate) {
    std::vector<std::string> names;
    for (const auto& p : presets()) names.emplace_back(p.name);
    app.add_option("--preset", o.preset, "Named channel pair")->check(CLI::IsMember(names));
    app.add_option("--model-m", o.model_m, "Main-channel special case (rayleigh, rice, nakagami_m, ...)");
    app.add_option("--model-e", o.model_e, "Eavesdropper special case");
    app.add_option("--shape-m", o.shape_m, "Shape parameters for --model-m");
    app.add_option("--shape-e", o.shape_e, "Shape parameters for --model-e");
    set_optional(app, "--km", o.kappa_m, "Main-channel kappa");
    set_optional(app, "--um", o.mu_m, "Main-channel mu");
    set_optional(app, "--ke", o.kappa_e, "Eavesdropper kappa");
    set_optional(app, "--ue", o.mu_e, "Eavesdropper mu");
    set_optional(app, "--gbar-m-db", o.gbar_m_db, "Main average SNR, dB (default 0)");
    set_optional(app, "--gbar-m-linear", o.gbar_m_linear, "Main average SNR, linear");
    set_optional(app, "--gbar-e-db", o.gbar_e_db, "Eavesdropper average SNR, dB (default 0)");
    set_optional(app, "--gbar-e-linear", o.gbar_e_linear, "Eavesdropper average SNR, linear");
    if (with_rate) {
        set_optional(app, "--rate-nats", o.rate_nats, "Target secrecy rate, nats");
        set_optional(app, "--rate-bits", o.rate_bits, "Target secrecy rate, bits");
    }
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

double resolve_gbar(const std::optional<double>& db, const std::optional<double>& linear, const char* side) {
    require(!(db && linear), std::string("give only one of --gbar-") + side + "-db and --gbar-" + side + "-linear");
    if (linear) return *linear;
    if (db) return db_to_linear(*db);
    return 1.0;
}

fading::KappaMuParams resolve_channel(const std::optional<double>& preset_kappa,
                                      const std::optional<double>& preset_mu, const std::string& model,
                                      const std::vector<double>& shape, const std::optional<double>& kappa,
                                      const std::optional<double>& mu, double gbar, const char* side) {
    std::optional<double> k = preset_kappa;
    std::optional<double> m = preset_mu;
    if (!model.empty()) {
        const auto p = fading::make_special_case(model, shape, gbar);
        k = p.kappa;
        m = p.mu;
    }
    if (kappa) k = kappa;
    if (mu) m = mu;
    require(k.has_value() && m.has_value(), std::string("the ") + side +
                                                " channel needs kappa and mu (--preset, --model-* or explicit flags)");
    fading::KappaMuParams p{*k, *m, gbar};
    p.validate();
    return p;
}

}  // namespace

secrecy::WiretapPair resolve_pair(const ChannelOptions& o) {
    std::optional<double> pkm, pum, pke, pue;
    double rate = 0.0;
    if (!o.preset.empty()) {
        const Preset* p = find_preset(o.preset);
        require(p != nullptr, "unknown preset '" + o.preset + "'");
        pkm = p->kappa_m;
        pum = p->mu_m;
        pke = p->kappa_e;
        pue = p->mu_e;
        rate = p->rate_nats;
    }
    require(o.shape_m.empty() || !o.model_m.empty(), "--shape-m needs --model-m");
    require(o.shape_e.empty() || !o.model_e.empty(), "--shape-e needs --model-e");
    const double gm = resolve_gbar(o.gbar_m_db, o.gbar_m_linear, "m");
    const double ge = resolve_gbar(o.gbar_e_db, o.gbar_e_linear, "e");

    secrecy::WiretapPair pair;
    pair.main = resolve_channel(pkm, pum, o.model_m, o.shape_m, o.kappa_m, o.mu_m, gm, "main");
    pair.eve = resolve_channel(pke, pue, o.model_e, o.shape_e, o.kappa_e, o.mu_e, ge, "eavesdropper");

    require(!(o.rate_nats && o.rate_bits), "give only one of --rate-nats and --rate-bits");
    if (o.rate_nats) rate = *o.rate_nats;
    if (o.rate_bits) rate = *o.rate_bits * std::numbers::ln2;
    pair.rate = rate;
    pair.validate();
    return pair;
}

}  // namespace kmsec::cli
