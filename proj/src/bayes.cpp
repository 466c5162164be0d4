#include "m4cd/bayes.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace m4cd {

FeatureHistogram::FeatureHistogram(int lo, int hi, double bandwidth, int min_total)
    : lo_(lo), hi_(hi), min_total_(min_total) {
    radius_ = int(std::ceil(4.0 * bandwidth));
    counts_.assign(size_t(support_size()), 0.0);

    kernel_.resize(size_t(2 * radius_ + 1));
    double sum = 0.0;
    for (int d = -radius_; d <= radius_; ++d) {
        const double z = d / bandwidth;
        kernel_[size_t(d + radius_)] = std::exp(-0.5 * z * z) / (bandwidth * std::sqrt(2.0 * M_PI));
        sum += kernel_[size_t(d + radius_)];
    }
    for (double& k : kernel_) k /= sum;

    // mass of the kernel centered at each support position, clipped to the
    // support; dividing by it makes every count contribute exactly 1
    edge_norm_.assign(size_t(support_size()), 1.0);
    for (int v = lo_; v <= hi_; ++v) {
        double mass = 0.0;
        for (int d = std::max(-radius_, lo_ - v); d <= std::min(radius_, hi_ - v); ++d)
            mass += kernel_[size_t(d + radius_)];
        edge_norm_[size_t(v - lo_)] = mass;
    }
}

void FeatureHistogram::add(int value) {
    counts_[size_t(clamp_int(value, lo_, hi_) - lo_)] += 1.0;
    total_ += 1.0;
}

void FeatureHistogram::decay(double forget) {
    if (forget <= 0.0) return;
    const double keep = 1.0 - forget;
    for (double& c : counts_) c *= keep;
    total_ *= keep;
}

double FeatureHistogram::density(int value) const {
    if (total_ < double(min_total_)) return 1.0 / support_size();
    const int q = clamp_int(value, lo_, hi_);
    double acc = 0.0;
    for (int d = std::max(-radius_, q - hi_); d <= std::min(radius_, q - lo_); ++d) {
        const int v = q - d;
        const double c = counts_[size_t(v - lo_)];
        if (c > 0.0) acc += c * kernel_[size_t(d + radius_)] / edge_norm_[size_t(v - lo_)];
    }
    return acc / total_;
}

namespace {

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));  // little-endian
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    return v;
}

void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

double get_f64(const uint8_t* p) {
    const uint64_t bits = get_u64(p);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void FeatureHistogram::serialize(std::vector<uint8_t>& out) const {
    put_u64(out, uint64_t(int64_t(lo_)));
    put_u64(out, uint64_t(int64_t(hi_)));
    put_u64(out, uint64_t(counts_.size()));
    for (double c : counts_) put_f64(out, c);
}

size_t FeatureHistogram::deserialize(const uint8_t* data, size_t size) {
    if (size < 24) throw std::runtime_error("histogram blob truncated");
    const int lo = int(int64_t(get_u64(data)));
    const int hi = int(int64_t(get_u64(data + 8)));
    const size_t n = size_t(get_u64(data + 16));
    if (lo != lo_ || hi != hi_ || n != counts_.size())
        throw std::runtime_error("histogram blob does not match the configured support");
    if (size < 24 + 8 * n) throw std::runtime_error("histogram blob truncated");
    total_ = 0.0;
    for (size_t i = 0; i < n; ++i) {
        counts_[i] = get_f64(data + 24 + 8 * i);
        if (counts_[i] < 0.0) throw std::runtime_error("histogram blob has negative count");
        total_ += counts_[i];
    }
    return 24 + 8 * n;
}

ClassConditionalModel::ClassConditionalModel(const PipelineConfig& cfg)
    : cfg_(cfg),
      bv_fg_(-kBvSupport, kBvSupport, cfg.kde_bandwidth, cfg.kde_min_total),
      cv_fg_(0, kBvSupport, cfg.kde_bandwidth, cfg.kde_min_total),
      tv_fg_(0, 24, cfg.kde_bandwidth, cfg.kde_min_total),
      bv_bg_(-kBvSupport, kBvSupport, cfg.kde_bandwidth, cfg.kde_min_total),
      cv_bg_(0, kBvSupport, cfg.kde_bandwidth, cfg.kde_min_total),
      tv_bg_(0, 24, cfg.kde_bandwidth, cfg.kde_min_total) {}

void ClassConditionalModel::accumulate_foreground(const FeatureMaps& fm) {
    const int w = fm.width(), h = fm.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double bv = fm.bv.at(x, y);
            const double cv = fm.cv.at(x, y);
            const int tv = fm.tv.at(x, y);
            const bool bv_high = std::abs(bv) > cfg_.tau_bv;
            const bool cv_high = cv > cfg_.tau_cv;
            const bool tv_high = tv > cfg_.tau_tv;
            if (cv_high || tv_high) bv_fg_.add(bv);
            if (bv_high || tv_high) cv_fg_.add(cv);
            if (bv_high || cv_high) tv_fg_.add(tv);
        }
    }
}

LabelMask ClassConditionalModel::plausible_background_mask(const FeatureMaps& fm) const {
    const int w = fm.width(), h = fm.height();
    LabelMask confident(w, h, kBackground);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (std::abs(fm.bv.at(x, y)) > cfg_.tau_bv || fm.cv.at(x, y) > cfg_.tau_cv ||
                fm.tv.at(x, y) > cfg_.tau_tv)
                confident.at(x, y) = kForeground;

    // dilate by a 3x3 square, then complement
    LabelMask mask(w, h, kForeground);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!confident.at(x, y)) continue;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && nx < w && ny >= 0 && ny < h)
                        mask.at(nx, ny) = kBackground;
                }
            }
        }
    }
    return mask;
}

void ClassConditionalModel::accumulate_background(const FeatureMaps& fm,
                                                  const LabelMask& background_mask) {
    const int w = fm.width(), h = fm.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!background_mask.at(x, y)) continue;
            bv_bg_.add(fm.bv.at(x, y));
            cv_bg_.add(fm.cv.at(x, y));
            tv_bg_.add(double(fm.tv.at(x, y)));
        }
    }
}

void ClassConditionalModel::end_frame() {
    if (cfg_.kde_forget <= 0.0) return;
    for (FeatureHistogram* hst : {&bv_fg_, &cv_fg_, &tv_fg_, &bv_bg_, &cv_bg_, &tv_bg_})
        hst->decay(cfg_.kde_forget);
}

double ClassConditionalModel::posterior_fg(const FeatureVector& fv, double prior_fg) const {
    auto log_density = [](const FeatureHistogram& hst, double v) {
        return std::log(std::max(hst.density(v), kDensityFloor));
    };
    const double log_fg = log_density(bv_fg_, fv.bv) + log_density(cv_fg_, fv.cv) +
                          log_density(tv_fg_, double(fv.tv)) + std::log(prior_fg);
    const double log_bg = log_density(bv_bg_, fv.bv) + log_density(cv_bg_, fv.cv) +
                          log_density(tv_bg_, double(fv.tv)) + std::log(1.0 - prior_fg);
    const double p = 1.0 / (1.0 + std::exp(log_bg - log_fg));
    return std::clamp(p, kPosteriorFloor, 1.0 - kPosteriorFloor);
}

bool ClassConditionalModel::warmed_up() const {
    for (const FeatureHistogram* hst : {&bv_fg_, &cv_fg_, &tv_fg_, &bv_bg_, &cv_bg_, &tv_bg_})
        if (hst->total() < double(cfg_.kde_min_total)) return false;
    return true;
}

namespace {
constexpr char kCheckpointMagic[8] = {'M', '4', 'C', 'D', 'C', 'K', '0', '1'};
}

void ClassConditionalModel::dump(const std::string& path) const {
    std::vector<uint8_t> blob(kCheckpointMagic, kCheckpointMagic + 8);
    for (const FeatureHistogram* hst : {&bv_fg_, &cv_fg_, &tv_fg_, &bv_bg_, &cv_bg_, &tv_bg_})
        hst->serialize(blob);
    std::ofstream out(path, std::ios::binary);
    if (!out.write(reinterpret_cast<const char*>(blob.data()), std::streamsize(blob.size())))
        throw std::runtime_error("cannot write checkpoint: " + path);
}

void ClassConditionalModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    std::vector<uint8_t> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (blob.size() < 8 || std::memcmp(blob.data(), kCheckpointMagic, 8) != 0)
        throw std::runtime_error("bad checkpoint header: " + path);
    size_t off = 8;
    for (FeatureHistogram* hst : {&bv_fg_, &cv_fg_, &tv_fg_, &bv_bg_, &cv_bg_, &tv_bg_})
        off += hst->deserialize(blob.data() + off, blob.size() - off);
}

void PriorMap::update(const LabelMask& labels) {
    const double rho = cfg_.prior_rho;
    for (size_t i = 0; i < priors_.size(); ++i) {
        const double l = labels[i] ? 1.0 : 0.0;
        priors_[i] = std::clamp((1.0 - rho) * priors_[i] + rho * l,
                                cfg_.prior_min, cfg_.prior_max);
    }
}

void PriorMap::serialize(std::vector<uint8_t>& out) const {
    put_u64(out, uint64_t(priors_.width()));
    put_u64(out, uint64_t(priors_.height()));
    for (double p : priors_.data()) put_f64(out, p);
}

size_t PriorMap::deserialize(const uint8_t* data, size_t size) {
    if (size < 16) throw std::runtime_error("prior map blob truncated");
    const int w = int(get_u64(data));
    const int h = int(get_u64(data + 8));
    if (w != priors_.width() || h != priors_.height())
        throw std::runtime_error("prior map blob has mismatched dimensions");
    const size_t n = priors_.size();
    if (size < 16 + 8 * n) throw std::runtime_error("prior map blob truncated");
    for (size_t i = 0; i < n; ++i) priors_[i] = get_f64(data + 16 + 8 * i);
    return 16 + 8 * n;
}

}  // namespace m4cd
