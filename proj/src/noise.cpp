#include "rbm/noise.hpp"

#include <cmath>

namespace rbm {

std::uint64_t NoiseSource::mix(std::uint64_t x) {
    // SplitMix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t NoiseSource::word(std::uint64_t path, std::uint64_t step,
                                std::uint32_t channel, std::uint32_t refine_level,
                                std::uint32_t refine_index, std::uint32_t lane) const {
    std::uint64_t s = mix(seed);
    s = mix(s ^ path);
    s = mix(s ^ step);
    s = mix(s ^ ((std::uint64_t(channel) << 32) | refine_level));
    s = mix(s ^ ((std::uint64_t(refine_index) << 32) | lane));
    return s;
}

double NoiseSource::normal(std::uint64_t path, std::uint64_t step,
                           std::uint32_t channel, std::uint32_t refine_level,
                           std::uint32_t refine_index) const {
    std::uint64_t w1 = word(path, step, channel, refine_level, refine_index, 0);
    std::uint64_t w2 = word(path, step, channel, refine_level, refine_index, 1);
    // u1 in (0, 1] so the log is finite; u2 in [0, 1)
    double u1 = (double(w1 >> 11) + 1.0) * 0x1.0p-53;
    double u2 = double(w2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rbm
