#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "m4cd/config.hpp"
#include "m4cd/image.hpp"
#include "m4cd/rng.hpp"

namespace m4cd {

// Per-pixel sample sets: N color samples and N texture (LTP) samples, stored
// planar per pixel so the distance scans vectorize. Color and texture sample
// sets evolve independently.
class BackgroundModel {
public:
    BackgroundModel(int width, int height, const PipelineConfig& cfg);

    int width() const { return w_; }
    int height() const { return h_; }
    int num_samples() const { return n_; }

    // Samples each pixel's sets from {first frame, temporal median frame},
    // uniformly over source and over the clamped 3x3 neighborhood.
    void initialize(const Frame& first, const Image<uint32_t>& first_ltp,
                    const RgbImage& median_rgb, const Image<uint32_t>& median_ltp,
                    Rng& rng);

    // Conservative / memoryless / spatially-propagating update at pixel (x, y).
    // No-op unless is_background; subject to the 1/subsampling_factor draw.
    void maybe_update(int x, int y, const Rgb& obs, uint32_t ltp_code,
                      bool is_background, Rng& rng);

    // Replaces ceil(N/2) samples of each kind per pixel with values drawn from
    // the current frame's clamped 3x3 neighborhood, and drops the subsampling
    // factor to 1 for the cooldown span.
    void reinitialize(const Frame& frame, const Image<uint32_t>& ltp, Rng& rng);

    // Advances the frame counter and the subsampling schedule.
    void advance_frame();

    int frame_counter() const { return frame_counter_; }
    int subsampling_factor() const;
    int frames_since_reinit() const;
    bool ever_reinitialized() const { return last_reinit_frame_ >= 0; }

    // Per-pixel per-channel median of the color samples (lower median).
    RgbImage color_median() const;

    // sample accessors (pixel-major blocks of N)
    const uint8_t* color_r(int x, int y) const { return colors_r_.data() + block(x, y); }
    const uint8_t* color_g(int x, int y) const { return colors_g_.data() + block(x, y); }
    const uint8_t* color_b(int x, int y) const { return colors_b_.data() + block(x, y); }
    const uint32_t* textures(int x, int y) const { return textures_.data() + block(x, y); }

    Rgb color_sample(int x, int y, int i) const {
        const size_t o = block(x, y) + size_t(i);
        return Rgb{colors_r_[o], colors_g_[o], colors_b_[o]};
    }

    friend bool operator==(const BackgroundModel&, const BackgroundModel&) = default;

private:
    size_t block(int x, int y) const { return (size_t(y) * w_ + x) * size_t(n_); }
    void set_color(size_t offset, const Rgb& c) {
        colors_r_[offset] = c.r;
        colors_g_[offset] = c.g;
        colors_b_[offset] = c.b;
    }

    int w_, h_, n_;
    int subsample_initial_frames_;
    int subsample_factor_;
    int reinit_cooldown_;
    int frame_counter_ = 0;
    int last_reinit_frame_ = -1;
    std::vector<uint8_t> colors_r_, colors_g_, colors_b_;
    std::vector<uint32_t> textures_;
};

struct DisparityTriple {
    double disp1 = 0.0;  // mean RGB distance between model and temporal median
    double disp2 = 0.0;  // fraction of significantly different pixels
    double disp3 = 1.0;  // exponential entropy of their spatial spread
};

// Frame-level monitor comparing the downscaled model median against a
// short-term temporal median of downscaled input frames.
class ReinitMonitor {
public:
    explicit ReinitMonitor(const PipelineConfig& cfg) : cfg_(cfg) {}

    // Buffers every reinit_sample_stride-th frame, downscaled by box average.
    void observe(const Frame& frame);

    bool ready() const { return int(ring_.size()) >= 2; }

    // Disparities of the current model against the buffered median; empty when
    // fewer than two frames are buffered.
    std::optional<DisparityTriple> disparities(const BackgroundModel& model) const;

    bool triggered(const DisparityTriple& d) const {
        return d.disp1 > cfg_.reinit_disp1 && d.disp2 > cfg_.reinit_disp2 &&
               d.disp3 > cfg_.reinit_disp3;
    }

    void clear() { ring_.clear(); }

    static RgbImage downscale(const RgbImage& img, int factor);

private:
    PipelineConfig cfg_;
    std::deque<RgbImage> ring_;
    int observed_ = 0;
};

}  // namespace m4cd
