#ifndef SACC_PRNG_HPP
#define SACC_PRNG_HPP

#include <cstdint>

namespace sacc {

// splitmix64: tiny, fast, and identical on every platform.  We use it instead
// of <random> distributions so that seeded stimuli are reproducible across
// compilers and standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [lo, hi] via rejection-free modulo; bias is
    // negligible for the small ranges used for stimuli and irrelevant for
    // reproducibility, which is the property we actually need.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

private:
    std::uint64_t state_;
};

}  // namespace sacc

#endif
