#include "kmsec/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "kmsec/errors.hpp"
#include "kmsec/rng.hpp"

namespace kmsec::montecarlo {
namespace {

struct BlockCounts {
    std::size_t spsc = 0;
    std::size_t sop = 0;
    std::size_t sop_lower = 0;
    std::size_t lower_only = 0;  // lower event without outage event
    std::size_t outage_only = 0;
};

BlockCounts run_block(const secrecy::WiretapPair& pair, std::uint64_t seed, std::size_t block,
                      std::size_t count) {
    rng::Philox4x32 engine(seed, block);
    fading::SnrSampler main(pair.main);
    fading::SnrSampler eve(pair.eve);
    const double shift = std::expm1(pair.rate);
    const double scale = std::exp(pair.rate);
    BlockCounts c;
    for (std::size_t i = 0; i < count; ++i) {
        const double gm = main(engine);
        const double ge = eve(engine);
        const bool outage = gm <= shift + scale * ge;
        const bool lower = gm <= scale * ge;
        c.spsc += gm > ge;
        c.sop += outage;
        c.sop_lower += lower;
        c.lower_only += lower && !outage;
        c.outage_only += outage && !lower;
    }
    return c;
}

}  // namespace

McEstimate make_estimate(std::size_t hits, std::size_t n, std::uint64_t seed) {
    McEstimate e;
    e.n = n;
    e.seed = seed;
    e.estimate = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n));
    return e;
}

McJoint mc_joint(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, unsigned threads) {
    pair.validate();
    if (n < kMinDraws) throw DomainError("Monte Carlo needs at least " + std::to_string(kMinDraws) + " draws");

    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<BlockCounts> counts(blocks);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < blocks; j = next++) {
            const std::size_t count = std::min(kBlockSize, n - j * kBlockSize);
            counts[j] = run_block(pair, seed, j, count);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    BlockCounts total;
    for (const auto& c : counts) {
        total.spsc += c.spsc;
        total.sop += c.sop;
        total.sop_lower += c.sop_lower;
        total.lower_only += c.lower_only;
        total.outage_only += c.outage_only;
    }
    McJoint out;
    out.spsc = make_estimate(total.spsc, n, seed);
    out.sop = make_estimate(total.sop, n, seed);
    out.sop_lower = make_estimate(total.sop_lower, n, seed);
    out.inclusion_violations = total.lower_only;
    // The paired difference D = 1{outage} - 1{lower} takes values in {-1, 0, 1}.
    const double nn = static_cast<double>(n);
    const double mean = (static_cast<double>(total.outage_only) - static_cast<double>(total.lower_only)) / nn;
    const double second = (static_cast<double>(total.outage_only) + static_cast<double>(total.lower_only)) / nn;
    out.diff_std_error = std::sqrt(std::max(0.0, second - mean * mean) / nn);
    return out;
}

McEstimate mc_spsc(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, unsigned threads) {
    return mc_joint(pair, n, seed, threads).spsc;
}

McEstimate mc_sop(const secrecy::WiretapPair& pair, std::size_t n, std::uint64_t seed, bool lower,
                  unsigned threads) {
    const McJoint j = mc_joint(pair, n, seed, threads);
    return lower ? j.sop_lower : j.sop;
}

}  // namespace kmsec::montecarlo
