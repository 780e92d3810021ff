#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mgres {

// Named PRNG streams. Every stream is an mt19937_64 seeded with
// splitmix64(seed ^ fnv1a(name)), so adding a stream never perturbs another.
// Streams in use: "synth", "initial_soc", "sample".

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view name) : eng_(splitmix64(seed ^ fnv1a(name))) {}

    std::uint64_t next() { return eng_(); }
    // [0, 1) with 53 random bits; avoids std::uniform_real_distribution, whose
    // output is implementation defined.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential() { return -std::log1p(-uniform()); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 eng_;
};

}  // namespace mgres
