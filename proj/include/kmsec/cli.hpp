#pragma once

// Command-line front end. `run` takes the arguments after the program name and
// never calls exit(), so the whole tool can be driven from tests.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kmsec/secrecy.hpp"

namespace kmsec::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,        // bad flags, invalid parameters, unreadable input
    kExitConvergence = 3,  // a series or quadrature did not converge
    kExitValidation = 4,   // a requested check failed
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Named channel configurations accepted by --preset.
struct Preset {
    std::string_view name;
    double kappa_m, mu_m, kappa_e, mu_e;
    double rate_nats;  // default rate when no rate flag is given
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

// Pair grids used by `validate`: "small" or "full".
std::vector<secrecy::WiretapPair> validation_grid(std::string_view name);

}  // namespace kmsec::cli
