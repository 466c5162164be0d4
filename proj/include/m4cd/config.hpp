#pragma once

#include <cstdint>
#include <string>

namespace m4cd {

// Every tunable of the pipeline with its default. Loaded from a flat
// key = value text file; unknown keys and out-of-range values are rejected
// with the offending key named.
struct PipelineConfig {
    // background model
    int num_samples = 50;          // N
    int num_close = 3;             // closest samples used per feature
    double ltp_tau = 0.1;          // multiplicative LTP tolerance
    int ltp_nu = 5;                // additive LTP tolerance
    int subsample_initial_frames = 100;  // factor 1 during this span
    int subsample_factor = 10;           // steady-state factor

    // reinitialization monitor
    double reinit_disp1 = 10.0;
    double reinit_disp2 = 0.5;
    double reinit_disp3 = 2.65;
    int reinit_downscale = 4;       // box-average factor
    int reinit_ring_capacity = 6;   // downscaled frames kept (covers 30 frames)
    int reinit_sample_stride = 5;   // buffer every k-th frame
    int reinit_check_stride = 10;   // evaluate every k-th frame
    int reinit_cooldown = 100;      // frames without checks after a reinit
    double reinit_sig_threshold = 30.0;  // "significantly different" distance
    int reinit_entropy_grid = 8;    // spatial grid for the entropy term

    // background-match gate for model updates
    double match_bv = 15.0;
    double match_cv = 15.0;
    int match_tv = 8;

    // multi-source learning thresholds
    double tau_bv = 50.0;
    double tau_cv = 20.0;
    int tau_tv = 8;

    // KDE
    double kde_bandwidth = 2.0;
    int kde_min_total = 1000;   // uniform fallback below this count
    double kde_forget = 0.0;    // optional exponential forgetting, 0 = off

    // dynamic prior
    double prior_rho = 0.001;
    double prior_init = 0.1;
    double prior_min = 0.01;
    double prior_max = 0.99;

    // MRF
    double mrf_phi = 30.0;     // pixel-pair weight
    double mrf_sigma = 400.0;  // color-difference scale
    double mrf_xi = 150.0;     // superpixel-pair weight
    double mrf_psi = 5.0;      // inter-layer compatibility weight
    double bp_tol = 1e-4;
    int bp_max_iters = 50;
    double bp_damping = 0.5;

    // SLIC
    int slic_region_size = 16;
    double slic_compactness = 10.0;
    int slic_iters = 5;

    // post-processing
    int area_small = 25;
    int area_large = 50;
    int area_pixel_threshold = 2 * 320 * 240;  // resolution cutoff for the two

    // pipeline
    int warmup_frames = 100;
    uint64_t seed = 0;
    bool force_scalar_kernels = false;

    // area filter threshold for a given resolution
    int area_threshold(int width, int height) const {
        return int64_t(width) * height < area_pixel_threshold ? area_small : area_large;
    }

    // Throws std::runtime_error naming the first invalid field.
    void validate() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace m4cd
