#pragma once

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kmsec/secrecy.hpp"

namespace kmsec::cli {

// Raw channel flags as given on the command line; resolved into a pair later
// so that presets, models and explicit values can be layered.
struct ChannelOptions {
    std::string preset;
    std::string model_m, model_e;
    std::vector<double> shape_m, shape_e;
    std::optional<double> kappa_m, mu_m, kappa_e, mu_e;
    std::optional<double> gbar_m_db, gbar_m_linear, gbar_e_db, gbar_e_linear;
    std::optional<double> rate_nats, rate_bits;
};

void add_channel_options(CLI::App& app, ChannelOptions& o, bool with_rate);

// Layering: preset, then --model-*, then explicit --k*/--u*. Average SNRs
// default to 0 dB, the rate to the preset's rate or 0. Throws DomainError.
secrecy::WiretapPair resolve_pair(const ChannelOptions& o);

double db_to_linear(double db);

}  // namespace kmsec::cli
