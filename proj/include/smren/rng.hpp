// rng.hpp -- counter-based splittable RNG: every (seed, stream, counter)
// triple maps to an independent 64-bit word, so parallel batches reproduce
// the sequential results bit-for-bit.
#pragma once

#include <cstdint>

namespace smren {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::splitmix64(seed ^ detail::splitmix64(stream * 0xda942042e4dd58b5ULL))),
          counter_(0) {}

    std::uint64_t next() { return detail::splitmix64(key_ ^ (0x9e3779b97f4a7c15ULL * ++counter_)); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace smren
