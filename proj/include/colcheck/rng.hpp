#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace colcheck {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 plus hand-rolled distributions. std::uniform_*_distribution and
// std::normal_distribution are implementation-defined, so sampling goes through
// the raw engine only; results are identical on every platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % n;
    }

    // standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // independent child stream (e.g. one per training trial)
    Rng stream(std::uint64_t id) const {
        std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (id + 1));
        return Rng(splitmix64(s));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
};

} // namespace colcheck
