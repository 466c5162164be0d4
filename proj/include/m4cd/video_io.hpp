#pragma once

#include <string>
#include <vector>

#include "m4cd/image.hpp"

namespace m4cd {

// BT.601 luma, round half up.
uint8_t to_gray(const Rgb& c);
GrayImage to_gray(const RgbImage& img);

RgbImage load_rgb(const std::string& path);
GrayImage load_gray(const std::string& path);
void write_rgb(const RgbImage& img, const std::string& path);
void write_gray(const GrayImage& img, const std::string& path);

// Ordered frame sequence backed by a directory of numbered images.
// Supports the CDnet layout (dir/input/inNNNNNN.jpg) and a flat numbered
// directory; frames carry 1-based indices in file order.
class FrameSequence {
public:
    explicit FrameSequence(const std::string& directory);

    int count() const { return int(paths_.size()); }
    int width() const { return width_; }
    int height() const { return height_; }

    // Loads frame i (1-based). Throws on unreadable files and on dimensions
    // differing from frame 1.
    Frame load(int index) const;

    const std::string& path(int index) const { return paths_.at(size_t(index - 1)); }

private:
    std::vector<std::string> paths_;
    int width_ = 0;
    int height_ = 0;
};

void write_mask(const LabelMask& mask, const std::string& path);
LabelMask load_mask(const std::string& path);

// Rejects files containing pixel values outside the five CDnet codes.
GroundTruthMask load_groundtruth(const std::string& path);

// temporalROI.txt: two whitespace-separated 1-based inclusive frame indices.
std::pair<int, int> load_temporal_roi(const std::string& path);

}  // namespace m4cd
