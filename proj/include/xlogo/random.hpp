#pragma once

// Seeded randomness with a platform-independent output sequence.
// std::mt19937_64's raw stream is fully specified by the standard; the
// <random> distributions are not, so bounded draws are done here.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace xlogo {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent stream for a (seed, salt...) tuple.
template <typename... Salt>
Rng derive_rng(std::uint64_t seed, Salt... salt) {
    std::uint64_t s = splitmix64(seed);
    ((s = splitmix64(s ^ static_cast<std::uint64_t>(salt))), ...);
    return Rng(s);
}

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = Rng::max() - Rng::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform_unit(rng) < p; }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_below(rng, i)]);
    }
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[uniform_below(rng, v.size())];
}

}  // namespace xlogo
