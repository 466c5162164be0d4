#include "m4cd/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include "m4cd/kernels.hpp"
#include "m4cd/ltp.hpp"
#include "m4cd/video_io.hpp"

namespace m4cd {

namespace {
double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

Pipeline::Pipeline(int width, int height, const PipelineConfig& cfg)
    : cfg_(cfg),
      w_(width),
      h_(height),
      rng_(cfg.seed),
      model_(width, height, cfg),
      learner_(cfg),
      priors_(width, height, cfg),
      monitor_(cfg),
      features_(width, height) {
    cfg_.validate();
    kernels::force_scalar(cfg_.force_scalar_kernels);
}

RgbImage Pipeline::temporal_median(const std::vector<const Frame*>& frames) {
    if (frames.empty()) throw std::runtime_error("temporal_median: no frames");
    const int w = frames.front()->rgb.width();
    const int h = frames.front()->rgb.height();
    RgbImage out(w, h);
    std::vector<uint8_t> vals(frames.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            uint8_t med[3];
            for (int c = 0; c < 3; ++c) {
                for (size_t i = 0; i < frames.size(); ++i) {
                    const Rgb& px = frames[i]->rgb.at(x, y);
                    vals[i] = c == 0 ? px.r : (c == 1 ? px.g : px.b);
                }
                const size_t k = (vals.size() - 1) / 2;  // lower median
                std::nth_element(vals.begin(), vals.begin() + k, vals.end());
                med[c] = vals[k];
            }
            out.at(x, y) = Rgb{med[0], med[1], med[2]};
        }
    }
    return out;
}

void Pipeline::initialize(const Frame& first, const std::vector<const Frame*>& median_frames) {
    const RgbImage median_rgb = temporal_median(median_frames);
    const GrayImage median_gray = to_gray(median_rgb);
    const Image<uint32_t> first_ltp = ltp_image(first.gray, cfg_.ltp_tau, cfg_.ltp_nu);
    const Image<uint32_t> median_ltp = ltp_image(median_gray, cfg_.ltp_tau, cfg_.ltp_nu);
    model_.initialize(first, first_ltp, median_rgb, median_ltp, rng_);
    initialized_ = true;
}

LabelMask Pipeline::label_rule2(const FeatureMaps& fm) const {
    LabelMask mask(w_, h_, kBackground);
    for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x)
            if (std::abs(fm.bv.at(x, y)) > cfg_.tau_bv || fm.cv.at(x, y) > cfg_.tau_cv ||
                fm.tv.at(x, y) > cfg_.tau_tv)
                mask.at(x, y) = kForeground;
    return mask;
}

LabelMask Pipeline::process_frame(const Frame& frame) {
    if (!initialized_) throw std::runtime_error("pipeline not initialized");
    if (frame.rgb.width() != w_ || frame.rgb.height() != h_)
        throw std::runtime_error("frame dimensions differ from the initialized size");

    diag_ = FrameDiagnostics{};
    diag_.frame_index = frame.index;
    model_.advance_frame();

    // 1. features
    auto t0 = std::chrono::steady_clock::now();
    const Image<uint32_t> ltp = ltp_image(frame.gray, cfg_.ltp_tau, cfg_.ltp_nu);
    extract_features(frame, ltp, model_, cfg_.num_close, features_);
    diag_.t_features = ms_since(t0);

    // 2. multi-source training-data accumulation
    t0 = std::chrono::steady_clock::now();
    learner_.accumulate_foreground(features_);
    const LabelMask bg_mask = learner_.plausible_background_mask(features_);
    learner_.accumulate_background(features_, bg_mask);
    learner_.end_frame();
    diag_.t_learning = ms_since(t0);

    // 3. labeling
    t0 = std::chrono::steady_clock::now();
    LabelMask mask;
    const bool warmup =
        model_.frame_counter() <= cfg_.warmup_frames || !learner_.warmed_up();
    diag_.warmup = warmup;
    if (warmup) {
        mask = label_rule2(features_);
        posteriors_ = Image<double>();
    } else {
        posteriors_ = Image<double>(w_, h_);
        for (int y = 0; y < h_; ++y)
            for (int x = 0; x < w_; ++x)
                posteriors_.at(x, y) = learner_.posterior_fg(features_.at(x, y), priors_.at(x, y));
        const SuperpixelMap spmap = slic_segment(frame.rgb, cfg_.slic_region_size,
                                                 cfg_.slic_compactness, cfg_.slic_iters);
        const TwoLayerGraph graph = build_graph(posteriors_, frame.rgb, spmap, cfg_);
        const BpResult bp = loopy_bp(graph, cfg_.bp_max_iters, cfg_.bp_tol, cfg_.bp_damping);
        diag_.bp_iterations = bp.iterations;
        diag_.bp_final_delta = bp.final_delta;
        diag_.bp_energy = bp.final_energy;
        mask = LabelMask(w_, h_, kBackground);
        for (size_t i = 0; i < mask.size(); ++i)
            if (bp.labeling.pixel[i]) mask[i] = kForeground;
    }

    // 4. post-processing
    raw_mask_ = mask;
    post_process(mask, cfg_.area_threshold(w_, h_));
    diag_.t_labeling = ms_since(t0);

    // 5-6. prior update, then conservative model update
    t0 = std::chrono::steady_clock::now();
    priors_.update(mask);
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
            const bool is_bg = matches_background(features_.at(x, y), cfg_) || mask.at(x, y) == kBackground;
            model_.maybe_update(x, y, frame.rgb.at(x, y), ltp.at(x, y), is_bg, rng_);
        }
    }

    // 7. frame-level reinitialization
    monitor_.observe(frame);
    const bool in_cooldown =
        model_.ever_reinitialized() && model_.frames_since_reinit() <= cfg_.reinit_cooldown;
    if (!in_cooldown && model_.frame_counter() % cfg_.reinit_check_stride == 0 &&
        monitor_.ready()) {
        if (const auto d = monitor_.disparities(model_)) {
            diag_.disparities = *d;
            if (monitor_.triggered(*d)) {
                model_.reinitialize(frame, ltp, rng_);
                diag_.reinit_triggered = true;
            }
        }
    }
    diag_.t_update = ms_since(t0);
    return mask;
}

void Pipeline::dump_checkpoint(const std::string& path) const {
    learner_.dump(path);
    std::vector<uint8_t> prior_blob;
    priors_.serialize(prior_blob);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out.write(reinterpret_cast<const char*>(prior_blob.data()), std::streamsize(prior_blob.size())))
        throw std::runtime_error("cannot write checkpoint: " + path);
}

}  // namespace m4cd
