#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "m4cd/kernels.hpp"

using namespace m4cd;

namespace {

struct RandomBytes {
    std::mt19937 eng{12345};
    uint8_t byte() { return uint8_t(eng()); }
    uint32_t code24() { return eng() & 0xffffff; }
};

}  // namespace

TEST_CASE("dispatch selects a usable kernel set") {
    CHECK(kernels::scalar().dist_sq_rgb != nullptr);
    CHECK(kernels::active().dist_sq_rgb != nullptr);
    if (kernels::avx2_available()) CHECK(std::string(kernels::active().name) == "avx2");
    kernels::force_scalar(true);
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::force_scalar(false);
}

TEST_CASE("simd dist_sq_rgb matches scalar reference") {
    if (!kernels::avx2_available()) return;
    RandomBytes rb;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rb.eng() % 130);
        std::vector<uint8_t> r(n), g(n), b(n);
        for (int i = 0; i < n; ++i) {
            r[i] = rb.byte();
            g[i] = rb.byte();
            b[i] = rb.byte();
        }
        const uint8_t pr = rb.byte(), pg = rb.byte(), pb = rb.byte();
        std::vector<int32_t> ref(n), simd(n);
        kernels::scalar().dist_sq_rgb(pr, pg, pb, r.data(), g.data(), b.data(), n, ref.data());
        kernels::active().dist_sq_rgb(pr, pg, pb, r.data(), g.data(), b.data(), n, simd.data());
        CHECK(ref == simd);
    }
}

TEST_CASE("simd hamming24 matches scalar reference") {
    if (!kernels::avx2_available()) return;
    RandomBytes rb;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rb.eng() % 130);
        std::vector<uint32_t> codes(n);
        for (int i = 0; i < n; ++i) codes[i] = rb.code24();
        const uint32_t q = rb.code24();
        std::vector<uint16_t> ref(n), simd(n);
        kernels::scalar().hamming24(q, codes.data(), n, ref.data());
        kernels::active().hamming24(q, codes.data(), n, simd.data());
        CHECK(ref == simd);
    }
}

TEST_CASE("simd luma_row matches scalar reference") {
    if (!kernels::avx2_available()) return;
    RandomBytes rb;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rb.eng() % 200);
        std::vector<uint8_t> rgb(size_t(3 * n));
        for (auto& v : rgb) v = rb.byte();
        std::vector<uint8_t> ref(n), simd(n);
        kernels::scalar().luma_row(rgb.data(), n, ref.data());
        kernels::active().luma_row(rgb.data(), n, simd.data());
        CHECK(ref == simd);
    }
}

TEST_CASE("scalar luma matches the rounded BT.601 formula") {
    auto expect = [](int r, int g, int b) {
        // exact: the numerator is an integer and k + 0.5 is representable
        return uint8_t(std::lround((299 * r + 587 * g + 114 * b) / 1000.0));
    };
    RandomBytes rb;
    for (int trial = 0; trial < 2000; ++trial) {
        const uint8_t rgb[3] = {rb.byte(), rb.byte(), rb.byte()};
        uint8_t out;
        kernels::scalar().luma_row(rgb, 1, &out);
        CHECK(out == expect(rgb[0], rgb[1], rgb[2]));
    }
}
