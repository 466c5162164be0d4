#pragma once

#include <string>
#include <vector>

#include "m4cd/config.hpp"
#include "m4cd/features.hpp"
#include "m4cd/image.hpp"

namespace m4cd {

// Quantized count histogram over an integer support with Gaussian-kernel
// density queries. The kernel is truncated at +/- 4h and renormalized per
// source bin so each count contributes unit mass over the support; below
// min_total counts the density falls back to uniform.
class FeatureHistogram {
public:
    FeatureHistogram() = default;
    FeatureHistogram(int lo, int hi, double bandwidth, int min_total);

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int support_size() const { return hi_ - lo_ + 1; }
    double total() const { return total_; }

    int quantize(double value) const {
        const long q = std::lround(value);
        return clamp_int(int(q < lo_ ? lo_ : (q > hi_ ? hi_ : q)), lo_, hi_);
    }

    void add(int value);
    void add(double value) { add(quantize(value)); }

    // exponential forgetting (scales all counts); no-op at factor 0
    void decay(double forget);

    double density(int value) const;
    double density(double value) const { return density(quantize(value)); }

    double count_at(int value) const { return counts_[size_t(value - lo_)]; }

    void serialize(std::vector<uint8_t>& out) const;
    size_t deserialize(const uint8_t* data, size_t size);

private:
    int lo_ = 0, hi_ = 0;
    int radius_ = 0;  // truncation radius, 4h rounded up
    int min_total_ = 1;
    double total_ = 0.0;
    std::vector<double> counts_;
    std::vector<double> kernel_;  // phi_h(d) / sum over [-radius, radius]
    std::vector<double> edge_norm_;  // per-position clipped-kernel mass
};

// Six class-conditional histograms (BV/CV/TV x FG/BG) fed by the
// multi-source selection rules, plus the naive-Bayes posterior.
class ClassConditionalModel {
public:
    explicit ClassConditionalModel(const PipelineConfig& cfg);

    // Eq-gated foreground accumulation: each pixel may feed zero to three of
    // the FG histograms depending on which other features exceed their
    // thresholds.
    void accumulate_foreground(const FeatureMaps& fm);

    // Confident-foreground pixels dilated by a 3x3 square, complemented.
    LabelMask plausible_background_mask(const FeatureMaps& fm) const;

    // Every masked pixel feeds all three BG histograms.
    void accumulate_background(const FeatureMaps& fm, const LabelMask& background_mask);

    void end_frame();  // applies optional forgetting

    // P(FG | f) via log-space naive Bayes, clamped to [1e-6, 1 - 1e-6].
    double posterior_fg(const FeatureVector& fv, double prior_fg) const;

    // all six histograms past the warm-up count
    bool warmed_up() const;

    const FeatureHistogram& bv_fg() const { return bv_fg_; }
    const FeatureHistogram& cv_fg() const { return cv_fg_; }
    const FeatureHistogram& tv_fg() const { return tv_fg_; }
    const FeatureHistogram& bv_bg() const { return bv_bg_; }
    const FeatureHistogram& cv_bg() const { return cv_bg_; }
    const FeatureHistogram& tv_bg() const { return tv_bg_; }

    void dump(const std::string& path) const;
    void load(const std::string& path);

private:
    PipelineConfig cfg_;
    FeatureHistogram bv_fg_, cv_fg_, tv_fg_;
    FeatureHistogram bv_bg_, cv_bg_, tv_bg_;
};

// Per-pixel foreground prior with exponential label smoothing.
class PriorMap {
public:
    PriorMap() = default;
    PriorMap(int w, int h, const PipelineConfig& cfg)
        : cfg_(cfg), priors_(w, h, cfg.prior_init) {}

    double at(int x, int y) const { return priors_.at(x, y); }
    const Image<double>& values() const { return priors_; }
    Image<double>& values() { return priors_; }

    // P <- clamp((1 - rho) P + rho L, min, max)
    void update(const LabelMask& labels);

    void serialize(std::vector<uint8_t>& out) const;
    size_t deserialize(const uint8_t* data, size_t size);

private:
    PipelineConfig cfg_;
    Image<double> priors_;
};

inline constexpr double kPosteriorFloor = 1e-6;
inline constexpr double kDensityFloor = 1e-12;
inline constexpr int kBvSupport = 443;  // BV in [-443, 443], CV in [0, 443]

}  // namespace m4cd
