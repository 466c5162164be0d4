#pragma once

#include <cstdint>

// Data-parallel inner loops of the per-pixel sample scans. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. All variants are bit-exact equivalent; the dispatch tests assert it.
namespace m4cd::kernels {

struct Dispatch {
    // Squared Euclidean RGB distances from (r,g,b) to n samples stored planar.
    void (*dist_sq_rgb)(uint8_t r, uint8_t g, uint8_t b,
                        const uint8_t* sr, const uint8_t* sg, const uint8_t* sb,
                        int n, int32_t* out);
    // Hamming distances between a 24-bit code and n stored codes.
    void (*hamming24)(uint32_t code, const uint32_t* codes, int n, uint16_t* out);
    // BT.601 luma (round half up) over a row of interleaved RGB triples.
    void (*luma_row)(const uint8_t* rgb, int n, uint8_t* out);
    const char* name;
};

const Dispatch& scalar();
const Dispatch& active();

bool avx2_available();

// Forces the scalar path regardless of CPU support (config / test hook).
void force_scalar(bool on);

}  // namespace m4cd::kernels
