#pragma once

#include <string>
#include <vector>

#include "m4cd/background_model.hpp"
#include "m4cd/bayes.hpp"
#include "m4cd/config.hpp"
#include "m4cd/features.hpp"
#include "m4cd/image.hpp"
#include "m4cd/mrf.hpp"
#include "m4cd/rng.hpp"
#include "m4cd/superpixels.hpp"

namespace m4cd {

struct FrameDiagnostics {
    int frame_index = 0;
    bool warmup = false;
    int bp_iterations = 0;
    double bp_final_delta = 0.0;
    double bp_energy = 0.0;
    bool reinit_triggered = false;
    DisparityTriple disparities;
    // stage timings, milliseconds
    double t_features = 0.0, t_learning = 0.0, t_labeling = 0.0, t_update = 0.0;
};

// Per-frame dataflow: features -> learning -> posteriors -> superpixels ->
// two-layer MRF -> post-processing -> prior and model updates.
class Pipeline {
public:
    Pipeline(int width, int height, const PipelineConfig& cfg);

    // median_frames: the first min(100, total) frames, used for the temporal
    // median of the initialization strategy; first = frame 1.
    void initialize(const Frame& first, const std::vector<const Frame*>& median_frames);

    LabelMask process_frame(const Frame& frame);

    const FrameDiagnostics& last_diagnostics() const { return diag_; }
    // labeling of the current frame before post-processing
    const LabelMask& last_raw_mask() const { return raw_mask_; }
    // per-pixel P(FG | f) of the current frame; empty during warm-up
    const Image<double>& last_posteriors() const { return posteriors_; }
    const BackgroundModel& model() const { return model_; }
    const ClassConditionalModel& learner() const { return learner_; }
    const PriorMap& priors() const { return priors_; }

    void dump_checkpoint(const std::string& path) const;

    // Median image over a set of frames, per pixel per channel (lower median).
    static RgbImage temporal_median(const std::vector<const Frame*>& frames);

private:
    LabelMask label_rule2(const FeatureMaps& fm) const;

    PipelineConfig cfg_;
    int w_, h_;
    Rng rng_;
    BackgroundModel model_;
    ClassConditionalModel learner_;
    PriorMap priors_;
    ReinitMonitor monitor_;
    FeatureMaps features_;
    FrameDiagnostics diag_;
    LabelMask raw_mask_;
    Image<double> posteriors_;
    bool initialized_ = false;
};

}  // namespace m4cd
