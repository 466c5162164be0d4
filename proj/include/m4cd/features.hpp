#pragma once

#include <cmath>

#include "m4cd/background_model.hpp"
#include "m4cd/config.hpp"
#include "m4cd/image.hpp"

namespace m4cd {

struct FeatureVector {
    double bv = 0.0;  // signed brightness variation
    double cv = 0.0;  // chromaticity variation, >= 0
    int tv = 0;       // texture variation, 0..24
};

struct FeatureMaps {
    Image<double> bv;
    Image<double> cv;
    Image<int> tv;

    FeatureMaps() = default;
    FeatureMaps(int w, int h) : bv(w, h), cv(w, h), tv(w, h) {}
    int width() const { return bv.width(); }
    int height() const { return bv.height(); }
    FeatureVector at(int x, int y) const { return {bv.at(x, y), cv.at(x, y), tv.at(x, y)}; }
};

// Brightness ratio of the observation against a background sample; a
// degenerate black sample (|E|^2 < 1) yields 1.
double alpha(const Rgb& obs, const Rgb& sample);

// (BV^s, CV^s): signed distance of alpha*E from E along the chromaticity
// line, and the orthogonal distance of O from that line.
std::pair<double, double> brightness_chroma(const Rgb& obs, const Rgb& sample);

// Median BV/CV over the num_close color samples nearest in RGB distance
// (ties by lower sample index).
std::pair<double, double> extract_color_features(const Rgb& obs, const uint8_t* sr,
                                                 const uint8_t* sg, const uint8_t* sb,
                                                 int n, int num_close);

// Median of the num_close smallest Hamming distances to the texture samples.
int extract_texture_feature(uint32_t code, const uint32_t* samples, int n, int num_close);

void extract_features(const Frame& frame, const Image<uint32_t>& ltp,
                      const BackgroundModel& model, int num_close, FeatureMaps& out);

inline bool matches_background(const FeatureVector& fv, const PipelineConfig& cfg) {
    return std::abs(fv.bv) < cfg.match_bv && fv.cv < cfg.match_cv && fv.tv < cfg.match_tv;
}

}  // namespace m4cd
