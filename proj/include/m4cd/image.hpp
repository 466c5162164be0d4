#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace m4cd {

struct Rgb {
    uint8_t r = 0;
    uint8_t g = 0;
    uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Squared Euclidean distance in RGB space.
inline int rgb_dist_sq(const Rgb& a, const Rgb& b) {
    const int dr = int(a.r) - int(b.r);
    const int dg = int(a.g) - int(b.g);
    const int db = int(a.b) - int(b.b);
    return dr * dr + dg * dg + db * db;
}

template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, T fill = T{})
        : w_(width), h_(height), data_(size_t(width) * size_t(height), fill) {}

    int width() const { return w_; }
    int height() const { return h_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) {
        assert(x >= 0 && x < w_ && y >= 0 && y < h_);
        return data_[size_t(y) * w_ + x];
    }
    const T& at(int x, int y) const {
        assert(x >= 0 && x < w_ && y >= 0 && y < h_);
        return data_[size_t(y) * w_ + x];
    }
    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    T* row(int y) { return data_.data() + size_t(y) * w_; }
    const T* row(int y) const { return data_.data() + size_t(y) * w_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

    template <typename U>
    bool same_size(const Image<U>& other) const {
        return w_ == other.width() && h_ == other.height();
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<T> data_;
};

using RgbImage = Image<Rgb>;
using GrayImage = Image<uint8_t>;

// Binary label mask: 0 = background, 255 = foreground.
using LabelMask = Image<uint8_t>;

inline constexpr uint8_t kForeground = 255;
inline constexpr uint8_t kBackground = 0;

// CDnet ground-truth codes.
inline constexpr uint8_t kGtStatic = 0;
inline constexpr uint8_t kGtShadow = 50;
inline constexpr uint8_t kGtOutsideRoi = 85;
inline constexpr uint8_t kGtUnknown = 170;
inline constexpr uint8_t kGtMoving = 255;

using GroundTruthMask = Image<uint8_t>;

struct Frame {
    int index = 0;  // 1-based
    RgbImage rgb;
    GrayImage gray;
};

inline int clamp_int(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace m4cd
