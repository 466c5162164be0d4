#pragma once

#include <cstdint>
#include <random>

namespace m4cd {

// Deterministic RNG. Bounded draws avoid std distributions so the stream is
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(uint32_t(seed ^ (seed >> 32))) {}

    uint32_t next_u32() { return eng_(); }

    // uniform in [0, n), n >= 1 (Lemire reduction)
    uint32_t below(uint32_t n) {
        return uint32_t((uint64_t(next_u32()) * n) >> 32);
    }

    // true with probability 1/f
    bool one_in(uint32_t f) { return f <= 1 || below(f) == 0; }

    double unit() { return next_u32() * 0x1p-32; }

private:
    std::mt19937 eng_;
};

}  // namespace m4cd
