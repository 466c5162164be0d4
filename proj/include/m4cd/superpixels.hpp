#pragma once

#include <vector>

#include "m4cd/image.hpp"

namespace m4cd {

struct SuperpixelMap {
    Image<int32_t> labels;  // 0-based contiguous ids
    int count = 0;
    std::vector<std::vector<int32_t>> members;  // flat pixel indices per id
    std::vector<std::pair<int32_t, int32_t>> adjacency;  // unordered pairs, sx < sy
    std::vector<std::vector<int32_t>> neighbors;  // per-id adjacency lists
};

// SLIC segmentation in RGB space: grid-seeded k-means with spatial
// regularization, followed by 4-connectivity enforcement (orphan components
// are absorbed into the largest adjacent superpixel, ties by lower id).
SuperpixelMap slic_segment(const RgbImage& img, int region_size,
                           double compactness, int iterations);

}  // namespace m4cd
