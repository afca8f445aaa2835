#ifndef TDGAT_RNG_HPP
#define TDGAT_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace tdgat {

// Seeded random stream with portable distributions. The standard
// distribution classes are implementation-defined, so uniform values
// are derived from raw engine output directly.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in [0, n). Modulo bias is irrelevant at our ranges.
    size_t uniform_index(size_t n) { return static_cast<size_t>(next() % n); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
    }

private:
    std::mt19937_64 gen_;
};

// FNV-1a: stable across platforms, unlike std::hash.
inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace tdgat

#endif
