#ifndef HCOPT_RNG_HPP
#define HCOPT_RNG_HPP

#include <cstdint>
#include <vector>

namespace hcopt {

// Deterministic RNG. mt19937_64 is fully specified by the standard, but the
// standard *distributions* are not, so uniform sampling is built from raw
// bits here. Identical seeds give bit-identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        // xorshift64* : tiny, fast, and fully portable.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    std::vector<double> uniform_vec(const std::vector<double>& lo,
                                    const std::vector<double>& hi) {
        std::vector<double> x(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
        return x;
    }

    Rng fork() { return Rng(next_u64()); }

private:
    std::uint64_t state_;
};

} // namespace hcopt

#endif
