#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace geogen {

// splitmix64, used to derive independent substream seeds. mt19937_64 itself
// is bit-exact across platforms; the distributions below avoid the standard
// library's <random> distributions, which are not.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform in {0, ..., n-1}
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool chance(double p) { return uniform() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[index(xs.size())];
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace geogen
