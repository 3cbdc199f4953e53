#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace moskit::rng {

// splitmix64 finalizer step. Standard constants.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a child seed from (master, label). FNV-1a over the label mixed
// with the master through splitmix64 rounds. Stable across platforms;
// used so per-clip randomness is independent of processing order.
inline uint64_t derive_seed(uint64_t master, std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s = h ^ a;
    uint64_t b = splitmix64(s);
    return b;
}

// Small deterministic generator built on splitmix64. The standard library
// distributions are implementation-defined, so all sampling is explicit
// here; outputs are bit-stable across compilers and platforms.
class Prng {
public:
    explicit Prng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased-enough index in [0, n); multiply-shift reduction.
    size_t uniform_index(size_t n) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second value is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    bool coin() { return (next_u64() & 1ULL) != 0; }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace moskit::rng

namespace moskit {
using rng::derive_seed;
using rng::Prng;
using rng::splitmix64;
} // namespace moskit
