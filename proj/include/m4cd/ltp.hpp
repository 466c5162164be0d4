#pragma once

#include <array>
#include <cstdint>

#include "m4cd/image.hpp"

namespace m4cd {

// 12-pixel neighborhood used by the local ternary pattern: the 8-connected
// ring plus the four axis-aligned pixels at Chebyshev distance 2, in
// row-major order. (dy, dx) pairs; slot k occupies bits [2*(11-k), 2*(11-k)+1]
// of the 24-bit code.
inline constexpr std::array<std::pair<int, int>, 12> kLtpNeighborhood = {{
    {-2, 0},
    {-1, -1}, {-1, 0}, {-1, 1},
    {0, -2}, {0, -1}, {0, 1}, {0, 2},
    {1, -1}, {1, 0}, {1, 1},
    {2, 0},
}};

// Three-way comparison of a neighbor intensity against the center:
// 01 brighter beyond tolerance, 10 darker beyond tolerance, 00 similar.
// The multiplicative tolerance tau binds in bright regions, the additive
// tolerance nu in dark regions; no pre-rounding of (1 +/- tau) * center.
inline uint32_t ltp_compare(uint8_t center, uint8_t neighbor,
                            double tau = 0.1, int nu = 5) {
    const double c = center;
    const double n = neighbor;
    if (n > std::max((1.0 + tau) * c, c + nu)) return 0b01;
    if (n < std::min((1.0 - tau) * c, c - nu)) return 0b10;
    return 0b00;
}

// 24-bit LTP code at (x, y); out-of-image neighbors clamp to the edge.
uint32_t ltp_response(const GrayImage& gray, int x, int y,
                      double tau = 0.1, int nu = 5);

// LTP codes for every pixel.
Image<uint32_t> ltp_image(const GrayImage& gray, double tau = 0.1, int nu = 5);

}  // namespace m4cd
