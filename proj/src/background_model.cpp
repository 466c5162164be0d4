#include "m4cd/background_model.hpp"

#include <algorithm>
#include <cmath>

namespace m4cd {

BackgroundModel::BackgroundModel(int width, int height, const PipelineConfig& cfg)
    : w_(width),
      h_(height),
      n_(cfg.num_samples),
      subsample_initial_frames_(cfg.subsample_initial_frames),
      subsample_factor_(cfg.subsample_factor),
      reinit_cooldown_(cfg.reinit_cooldown) {
    const size_t total = size_t(w_) * h_ * n_;
    colors_r_.resize(total);
    colors_g_.resize(total);
    colors_b_.resize(total);
    textures_.resize(total);
}

void BackgroundModel::initialize(const Frame& first, const Image<uint32_t>& first_ltp,
                                 const RgbImage& median_rgb, const Image<uint32_t>& median_ltp,
                                 Rng& rng) {
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
            const size_t base = block(x, y);
            for (int i = 0; i < n_; ++i) {
                // color sample: random source, random clamped 3x3 position
                {
                    const bool from_median = rng.below(2) == 1;
                    const int sx = clamp_int(x + int(rng.below(3)) - 1, 0, w_ - 1);
                    const int sy = clamp_int(y + int(rng.below(3)) - 1, 0, h_ - 1);
                    set_color(base + i, from_median ? median_rgb.at(sx, sy) : first.rgb.at(sx, sy));
                }
                // texture sample: independent draws
                {
                    const bool from_median = rng.below(2) == 1;
                    const int sx = clamp_int(x + int(rng.below(3)) - 1, 0, w_ - 1);
                    const int sy = clamp_int(y + int(rng.below(3)) - 1, 0, h_ - 1);
                    textures_[base + i] = from_median ? median_ltp.at(sx, sy) : first_ltp.at(sx, sy);
                }
            }
        }
    }
}

int BackgroundModel::subsampling_factor() const {
    if (frame_counter_ <= subsample_initial_frames_) return 1;
    if (last_reinit_frame_ >= 0 && frames_since_reinit() <= reinit_cooldown_) return 1;
    return subsample_factor_;
}

int BackgroundModel::frames_since_reinit() const {
    return last_reinit_frame_ < 0 ? frame_counter_ : frame_counter_ - last_reinit_frame_;
}

void BackgroundModel::advance_frame() { ++frame_counter_; }

void BackgroundModel::maybe_update(int x, int y, const Rgb& obs, uint32_t ltp_code,
                                   bool is_background, Rng& rng) {
    if (!is_background) return;
    const uint32_t factor = uint32_t(subsampling_factor());
    if (rng.one_in(factor)) {
        const size_t base = block(x, y);
        set_color(base + rng.below(uint32_t(n_)), obs);
        textures_[base + rng.below(uint32_t(n_))] = ltp_code;
    }
    // spatial propagation: independent draw, random in-image 8-neighbor
    if (rng.one_in(factor)) {
        int nxs[8], nys[8], count = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && nx < w_ && ny >= 0 && ny < h_) {
                    nxs[count] = nx;
                    nys[count] = ny;
                    ++count;
                }
            }
        }
        if (count == 0) return;
        const uint32_t pick = rng.below(uint32_t(count));
        const size_t base = block(nxs[pick], nys[pick]);
        set_color(base + rng.below(uint32_t(n_)), obs);
        textures_[base + rng.below(uint32_t(n_))] = ltp_code;
    }
}

void BackgroundModel::reinitialize(const Frame& frame, const Image<uint32_t>& ltp, Rng& rng) {
    const int replace = (n_ + 1) / 2;
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
            const size_t base = block(x, y);
            for (int k = 0; k < replace; ++k) {
                {
                    const int sx = clamp_int(x + int(rng.below(3)) - 1, 0, w_ - 1);
                    const int sy = clamp_int(y + int(rng.below(3)) - 1, 0, h_ - 1);
                    set_color(base + rng.below(uint32_t(n_)), frame.rgb.at(sx, sy));
                }
                {
                    const int sx = clamp_int(x + int(rng.below(3)) - 1, 0, w_ - 1);
                    const int sy = clamp_int(y + int(rng.below(3)) - 1, 0, h_ - 1);
                    textures_[base + rng.below(uint32_t(n_))] = ltp.at(sx, sy);
                }
            }
        }
    }
    last_reinit_frame_ = frame_counter_;
}

RgbImage BackgroundModel::color_median() const {
    RgbImage out(w_, h_);
    std::vector<uint8_t> buf;
    buf.resize(size_t(n_));
    auto lower_median = [&](const uint8_t* samples) {
        buf.assign(samples, samples + n_);
        const size_t k = size_t((n_ - 1) / 2);  // lower median for even counts
        std::nth_element(buf.begin(), buf.begin() + k, buf.end());
        return buf[k];
    };
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
            out.at(x, y) = Rgb{lower_median(color_r(x, y)),
                               lower_median(color_g(x, y)),
                               lower_median(color_b(x, y))};
        }
    }
    return out;
}

RgbImage ReinitMonitor::downscale(const RgbImage& img, int factor) {
    const int ow = std::max(1, img.width() / factor);
    const int oh = std::max(1, img.height() / factor);
    RgbImage out(ow, oh);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            int sum_r = 0, sum_g = 0, sum_b = 0, count = 0;
            const int y1 = std::min((oy + 1) * factor, img.height());
            const int x1 = std::min((ox + 1) * factor, img.width());
            for (int y = oy * factor; y < y1; ++y) {
                for (int x = ox * factor; x < x1; ++x) {
                    const Rgb& c = img.at(x, y);
                    sum_r += c.r;
                    sum_g += c.g;
                    sum_b += c.b;
                    ++count;
                }
            }
            out.at(ox, oy) = Rgb{uint8_t((sum_r + count / 2) / count),
                                 uint8_t((sum_g + count / 2) / count),
                                 uint8_t((sum_b + count / 2) / count)};
        }
    }
    return out;
}

void ReinitMonitor::observe(const Frame& frame) {
    ++observed_;
    if ((observed_ - 1) % cfg_.reinit_sample_stride != 0) return;
    ring_.push_back(downscale(frame.rgb, cfg_.reinit_downscale));
    while (int(ring_.size()) > cfg_.reinit_ring_capacity) ring_.pop_front();
}

std::optional<DisparityTriple> ReinitMonitor::disparities(const BackgroundModel& model) const {
    if (!ready()) return std::nullopt;

    // temporal median of the ring, per pixel per channel (lower median)
    const RgbImage& shape = ring_.front();
    const int w = shape.width(), h = shape.height();
    RgbImage temporal_median(w, h);
    std::vector<uint8_t> vals(ring_.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            uint8_t med[3];
            for (int c = 0; c < 3; ++c) {
                for (size_t i = 0; i < ring_.size(); ++i) {
                    const Rgb& px = ring_[i].at(x, y);
                    vals[i] = c == 0 ? px.r : (c == 1 ? px.g : px.b);
                }
                const size_t k = (vals.size() - 1) / 2;
                std::nth_element(vals.begin(), vals.begin() + k, vals.end());
                med[c] = vals[k];
            }
            temporal_median.at(x, y) = Rgb{med[0], med[1], med[2]};
        }
    }

    const RgbImage model_median = downscale(model.color_median(), cfg_.reinit_downscale);

    DisparityTriple d;
    const int grid = cfg_.reinit_entropy_grid;
    std::vector<int> cell_counts(size_t(grid) * grid, 0);
    int significant = 0;
    double dist_sum = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dist = std::sqrt(double(rgb_dist_sq(model_median.at(x, y),
                                                             temporal_median.at(x, y))));
            dist_sum += dist;
            if (dist > cfg_.reinit_sig_threshold) {
                ++significant;
                const int cx = std::min(x * grid / w, grid - 1);
                const int cy = std::min(y * grid / h, grid - 1);
                ++cell_counts[size_t(cy) * grid + cx];
            }
        }
    }
    const double total = double(w) * h;
    d.disp1 = dist_sum / total;
    d.disp2 = significant / total;
    if (significant > 0) {
        double entropy = 0.0;
        for (int c : cell_counts) {
            if (c == 0) continue;
            const double p = c / double(significant);
            entropy -= p * std::log(p);
        }
        d.disp3 = std::exp(entropy);
    }
    return d;
}

}  // namespace m4cd
