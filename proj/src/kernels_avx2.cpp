#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

#include "m4cd/kernels.hpp"

namespace m4cd::kernels {

namespace {

void dist_sq_rgb_avx2(uint8_t r, uint8_t g, uint8_t b,
                      const uint8_t* sr, const uint8_t* sg, const uint8_t* sb,
                      int n, int32_t* out) {
    const __m256i vr = _mm256_set1_epi32(r);
    const __m256i vg = _mm256_set1_epi32(g);
    const __m256i vb = _mm256_set1_epi32(b);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i xr = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(sr + i)));
        const __m256i xg = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(sg + i)));
        const __m256i xb = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(sb + i)));
        const __m256i dr = _mm256_sub_epi32(vr, xr);
        const __m256i dg = _mm256_sub_epi32(vg, xg);
        const __m256i db = _mm256_sub_epi32(vb, xb);
        __m256i acc = _mm256_mullo_epi32(dr, dr);
        acc = _mm256_add_epi32(acc, _mm256_mullo_epi32(dg, dg));
        acc = _mm256_add_epi32(acc, _mm256_mullo_epi32(db, db));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), acc);
    }
    for (; i < n; ++i) {
        const int dr = int(r) - int(sr[i]);
        const int dg = int(g) - int(sg[i]);
        const int db = int(b) - int(sb[i]);
        out[i] = dr * dr + dg * dg + db * db;
    }
}

void hamming24_avx2(uint32_t code, const uint32_t* codes, int n, uint16_t* out) {
    const __m256i vcode = _mm256_set1_epi32(int(code));
    const __m256i lut = _mm256_setr_epi8(
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i ones8 = _mm256_set1_epi8(1);
    const __m256i ones16 = _mm256_set1_epi16(1);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i x = _mm256_xor_si256(
            vcode, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(codes + i)));
        const __m256i lo = _mm256_and_si256(x, low_mask);
        const __m256i hi = _mm256_and_si256(_mm256_srli_epi32(x, 4), low_mask);
        const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                            _mm256_shuffle_epi8(lut, hi));
        // sum the 4 byte counts of each 32-bit lane
        const __m256i pair = _mm256_maddubs_epi16(cnt, ones8);
        const __m256i sum = _mm256_madd_epi16(pair, ones16);
        alignas(32) int32_t tmp[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), sum);
        for (int k = 0; k < 8; ++k) out[i + k] = uint16_t(tmp[k]);
    }
    for (; i < n; ++i) out[i] = uint16_t(std::popcount(code ^ codes[i]));
}

void luma_row_avx2(const uint8_t* rgb, int n, uint8_t* out) {
    const __m256i byte_idx = _mm256_setr_epi32(0, 3, 6, 9, 12, 15, 18, 21);
    const __m256i mask_ff = _mm256_set1_epi32(0xff);
    const __m256i wr = _mm256_set1_epi32(299);
    const __m256i wg = _mm256_set1_epi32(587);
    const __m256i wb = _mm256_set1_epi32(114);
    const __m256i bias = _mm256_set1_epi32(500);
    int i = 0;
    // the dword gather at pixel i+7 reads one byte past its triple, so stop
    // one full vector before the row end
    for (; i + 9 <= n; i += 8) {
        const __m256i packed = _mm256_i32gather_epi32(
            reinterpret_cast<const int*>(rgb + 3 * i), byte_idx, 1);
        const __m256i r = _mm256_and_si256(packed, mask_ff);
        const __m256i g = _mm256_and_si256(_mm256_srli_epi32(packed, 8), mask_ff);
        const __m256i b = _mm256_and_si256(_mm256_srli_epi32(packed, 16), mask_ff);
        __m256i acc = _mm256_mullo_epi32(r, wr);
        acc = _mm256_add_epi32(acc, _mm256_mullo_epi32(g, wg));
        acc = _mm256_add_epi32(acc, _mm256_mullo_epi32(b, wb));
        acc = _mm256_add_epi32(acc, bias);
        // divide by 1000: exact via 64-bit multiply per lane is overkill here,
        // values fit in 18 bits so (acc * 274877907) >> 38 is exact for acc < 2^20
        alignas(32) int32_t tmp[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), acc);
        for (int k = 0; k < 8; ++k)
            out[i + k] = uint8_t((int64_t(tmp[k]) * 274877907LL) >> 38);
    }
    for (; i < n; ++i) {
        const int r = rgb[3 * i + 0];
        const int g = rgb[3 * i + 1];
        const int b = rgb[3 * i + 2];
        out[i] = uint8_t((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
}

}  // namespace

const Dispatch& avx2_dispatch() {
    static const Dispatch d{dist_sq_rgb_avx2, hamming24_avx2, luma_row_avx2, "avx2"};
    return d;
}

}  // namespace m4cd::kernels

#endif  // x86-64
