#pragma once

// Monte Carlo estimates of the wiretap metrics from simulated SNR pairs.
//
// Draws are organised in fixed blocks of kBlockSize pairs. Block j uses the
// Philox stream (seed, j) with fresh samplers, so a run is a pure function of
// (pair, n, seed) no matter how blocks are spread over threads.

#include <cstddef>
#include <cstdint>

#include "kmsec/secrecy.hpp"

namespace kmsec::montecarlo {

inline constexpr std::size_t kBlockSize = 65536;
inline constexpr std::size_t kMinDraws = 1000;

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;  // sqrt(p (1 - p) / n)
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

// All three events counted on one shared stream of (gamma_M, gamma_E) pairs.
struct McJoint {
    McEstimate spsc;       // gamma_M > gamma_E
    McEstimate sop;        // gamma_M <= e^R (1 + gamma_E) - 1
    McEstimate sop_lower;  // gamma_M <= e^R gamma_E
    // Draws where the lower-bound event held but the outage event did not.
    // Zero whenever R >= 0.
    std::size_t inclusion_violations = 0;
    // Standard error of the paired difference sop - sop_lower.
    double diff_std_error = 0.0;
};

// threads = 0 picks std::thread::hardware_concurrency().
McJoint mc_joint(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, unsigned threads = 0);

McEstimate mc_spsc(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, unsigned threads = 0);
McEstimate mc_sop(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, bool lower,
                  unsigned threads = 0);

McEstimate make_estimate(std::size_t hits, std::size_t n, std::uint64_t seed);

}  // namespace kmsec::montecarlo
