#include <vector>

#include "m4cd/mrf.hpp"

namespace m4cd {

namespace {

// flood fill over pixels matching `value`, returns the component and whether
// it touches the image border
struct Component {
    std::vector<int32_t> pixels;
    bool touches_border = false;
};

Component flood(const LabelMask& mask, std::vector<uint8_t>& visited, int start,
                uint8_t value, bool eight_connected) {
    const int w = mask.width(), h = mask.height();
    Component comp;
    std::vector<int32_t> stack{start};
    visited[size_t(start)] = 1;
    while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        const int x = p % w, y = p / w;
        if (x == 0 || x == w - 1 || y == 0 || y == h - 1) comp.touches_border = true;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                if (!eight_connected && dx != 0 && dy != 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const int q = ny * w + nx;
                if (!visited[size_t(q)] && mask[size_t(q)] == value) {
                    visited[size_t(q)] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    return comp;
}

}  // namespace

void post_process(LabelMask& mask, int area_threshold) {
    const size_t n = mask.size();
    std::vector<uint8_t> visited(n, 0);

    // area filter: drop small 8-connected foreground components
    for (size_t p = 0; p < n; ++p) {
        if (visited[p] || mask[p] != kForeground) continue;
        const Component comp = flood(mask, visited, int(p), kForeground, true);
        if (int(comp.pixels.size()) < area_threshold)
            for (int32_t q : comp.pixels) mask[size_t(q)] = kBackground;
    }

    // hole filling: fill small enclosed 4-connected background components
    std::fill(visited.begin(), visited.end(), 0);
    for (size_t p = 0; p < n; ++p) {
        if (visited[p] || mask[p] != kBackground) continue;
        const Component comp = flood(mask, visited, int(p), kBackground, false);
        if (!comp.touches_border && int(comp.pixels.size()) < area_threshold)
            for (int32_t q : comp.pixels) mask[size_t(q)] = kForeground;
    }
}

}  // namespace m4cd
