#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dse {

using Rng = std::mt19937_64;

// All randomness in a run flows from one seed through named sub-streams, so
// components can be re-run in isolation and still see the same draws.
// The name (and optional salt, e.g. a design-point hash) is folded into the
// seed with FNV-1a before seeding the engine.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name,
                                    std::uint64_t salt = 0) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(seed);
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    mix(salt);
    return h;
}

inline Rng make_substream(std::uint64_t seed, std::string_view name, std::uint64_t salt = 0) {
    return Rng(substream_seed(seed, name, salt));
}

} // namespace dse
