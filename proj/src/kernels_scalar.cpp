#include "m4cd/kernels.hpp"

#include <atomic>
#include <bit>

namespace m4cd::kernels {

namespace {

void dist_sq_rgb_scalar(uint8_t r, uint8_t g, uint8_t b,
                        const uint8_t* sr, const uint8_t* sg, const uint8_t* sb,
                        int n, int32_t* out) {
    for (int i = 0; i < n; ++i) {
        const int dr = int(r) - int(sr[i]);
        const int dg = int(g) - int(sg[i]);
        const int db = int(b) - int(sb[i]);
        out[i] = dr * dr + dg * dg + db * db;
    }
}

void hamming24_scalar(uint32_t code, const uint32_t* codes, int n, uint16_t* out) {
    for (int i = 0; i < n; ++i)
        out[i] = uint16_t(std::popcount(code ^ codes[i]));
}

void luma_row_scalar(const uint8_t* rgb, int n, uint8_t* out) {
    for (int i = 0; i < n; ++i) {
        const int r = rgb[3 * i + 0];
        const int g = rgb[3 * i + 1];
        const int b = rgb[3 * i + 2];
        // round(0.299 R + 0.587 G + 0.114 B), half up, exact in integers
        out[i] = uint8_t((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
}

std::atomic<bool> g_force_scalar{false};

}  // namespace

const Dispatch& scalar() {
    static const Dispatch d{dist_sq_rgb_scalar, hamming24_scalar, luma_row_scalar, "scalar"};
    return d;
}

#if defined(__x86_64__) || defined(_M_X64)
const Dispatch& avx2_dispatch();  // kernels_avx2.cpp

bool avx2_available() {
    return __builtin_cpu_supports("avx2");
}
#else
bool avx2_available() { return false; }
#endif

const Dispatch& active() {
    if (g_force_scalar.load(std::memory_order_relaxed)) return scalar();
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return avx2_dispatch();
#endif
    return scalar();
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

}  // namespace m4cd::kernels
