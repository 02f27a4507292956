// Deterministic counter-based Gaussian noise. Each draw is a pure function of
// (seed, path, step, channel, refine level, refine index), so ensembles are
// reproducible bit-for-bit for any worker count and any evaluation order.
//
// Derivation: the counters are absorbed into a 64-bit state through repeated
// SplitMix64 finalizer rounds (golden-ratio increment, xor-shift-multiply
// avalanche). Two derived words feed a Box-Muller transform; the cosine
// branch is returned. u1 is mapped into (0,1] so log(u1) is always finite.
#pragma once

#include <cstdint>

namespace rbm {

struct NoiseSource {
    std::uint64_t seed = 0;

    // SplitMix64 finalizer round.
    static std::uint64_t mix(std::uint64_t x);

    // Uniform word for the given counters.
    std::uint64_t word(std::uint64_t path, std::uint64_t step, std::uint32_t channel,
                       std::uint32_t refine_level, std::uint32_t refine_index,
                       std::uint32_t lane) const;

    // Standard normal draw N(0,1).
    double normal(std::uint64_t path, std::uint64_t step, std::uint32_t channel,
                  std::uint32_t refine_level = 0, std::uint32_t refine_index = 0) const;
};

}  // namespace rbm
