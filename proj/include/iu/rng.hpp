#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iu {

namespace detail {
// splitmix64 finalizer, used to decorrelate derived stream seeds
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic random stream. Uniform and gaussian draws are generated
// explicitly (not via std distributions) so that a given seed produces the
// same sequence on every standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(detail::mix64(seed)) {}

    // Independent stream for a named sub-purpose of this seed.
    RandomStream derive(std::uint64_t stream_id) const {
        return RandomStream(detail::mix64(seed_ ^ detail::mix64(stream_id)));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    int uniform_int(int n) {  // 0..n-1; modulo bias negligible for n << 2^64
        return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
    }

    // standard normal, Box-Muller; the paired value is cached
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        double u2 = uniform01();
        double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace iu
