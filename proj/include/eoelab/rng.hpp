#pragma once

#include <cstdint>
#include <random>

namespace eoelab::rng {

// splitmix64; used for seed derivation only, never as the sampling stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-derived sub-stream seed: independent of evaluation order, so
// batch element i always sees the same stream no matter how the batch is
// scheduled.
inline std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= 0x94d049bb133111ebULL * (index + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// mt19937_64 is fully specified by the standard, which is what makes the
// bit-identical-across-runs sampling contract possible.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0,1); safe to feed into inverse CDFs
    // and logs without hitting 0 or 1 exactly.
    double next_open01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double next_half_open01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace eoelab::rng
