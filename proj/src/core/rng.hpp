#pragma once

#include <cstdint>

namespace vmn {

// Deterministic RNG used everywhere randomness is needed. Distributions are
// implemented by hand so that sequences are identical across standard-library
// implementations; file-level reproducibility depends on it.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // decorrelated child stream, e.g. one per dataset record
    Rng child(std::uint64_t index) const {
        Rng c(state_ ^ (0xd1342543de82ef95ull * (index + 1)));
        c.next_u64();
        return c;
    }

  private:
    std::uint64_t state_;
};

} // namespace vmn
