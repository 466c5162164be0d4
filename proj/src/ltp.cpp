#include "m4cd/ltp.hpp"

namespace m4cd {

uint32_t ltp_response(const GrayImage& gray, int x, int y, double tau, int nu) {
    const uint8_t center = gray.at(x, y);
    uint32_t code = 0;
    for (const auto& [dy, dx] : kLtpNeighborhood) {
        const int nx = clamp_int(x + dx, 0, gray.width() - 1);
        const int ny = clamp_int(y + dy, 0, gray.height() - 1);
        code = (code << 2) | ltp_compare(center, gray.at(nx, ny), tau, nu);
    }
    return code;
}

Image<uint32_t> ltp_image(const GrayImage& gray, double tau, int nu) {
    Image<uint32_t> out(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x)
            out.at(x, y) = ltp_response(gray, x, y, tau, nu);
    return out;
}

}  // namespace m4cd
