#include "m4cd/features.hpp"

#include <algorithm>
#include <cmath>

#include "m4cd/kernels.hpp"

namespace m4cd {

double alpha(const Rgb& obs, const Rgb& sample) {
    const double ee = double(sample.r) * sample.r + double(sample.g) * sample.g +
                      double(sample.b) * sample.b;
    if (ee < 1.0) return 1.0;
    const double oe = double(obs.r) * sample.r + double(obs.g) * sample.g +
                      double(obs.b) * sample.b;
    return oe / ee;
}

std::pair<double, double> brightness_chroma(const Rgb& obs, const Rgb& sample) {
    const double a = alpha(obs, sample);
    const double norm_e = std::sqrt(double(sample.r) * sample.r + double(sample.g) * sample.g +
                                    double(sample.b) * sample.b);
    const double bv = (a - 1.0) * norm_e;
    const double dr = obs.r - a * sample.r;
    const double dg = obs.g - a * sample.g;
    const double db = obs.b - a * sample.b;
    const double cv = std::sqrt(dr * dr + dg * dg + db * db);
    return {bv, cv};
}

namespace {

// indices of the k smallest values, ties broken by lower index
template <typename T>
void smallest_k(const T* vals, int n, int k, int* out) {
    for (int j = 0; j < k; ++j) out[j] = -1;
    for (int i = 0; i < n; ++i) {
        int j = k;
        while (j > 0 && (out[j - 1] < 0 || vals[i] < vals[out[j - 1]])) --j;
        if (j < k) {
            for (int s = k - 1; s > j; --s) out[s] = out[s - 1];
            out[j] = i;
        }
    }
}

double median_of(double* v, int k) {
    std::sort(v, v + k);
    return v[(k - 1) / 2];  // lower median for even k
}

}  // namespace

std::pair<double, double> extract_color_features(const Rgb& obs, const uint8_t* sr,
                                                 const uint8_t* sg, const uint8_t* sb,
                                                 int n, int num_close) {
    int32_t dist[256];
    int idx[16];
    const auto& k = kernels::active();
    k.dist_sq_rgb(obs.r, obs.g, obs.b, sr, sg, sb, n, dist);
    smallest_k(dist, n, num_close, idx);

    double bvs[16], cvs[16];
    for (int j = 0; j < num_close; ++j) {
        const Rgb sample{sr[idx[j]], sg[idx[j]], sb[idx[j]]};
        std::tie(bvs[j], cvs[j]) = brightness_chroma(obs, sample);
    }
    return {median_of(bvs, num_close), median_of(cvs, num_close)};
}

int extract_texture_feature(uint32_t code, const uint32_t* samples, int n, int num_close) {
    uint16_t dist[256];
    int idx[16];
    const auto& k = kernels::active();
    k.hamming24(code, samples, n, dist);
    smallest_k(dist, n, num_close, idx);

    uint16_t close[16];
    for (int j = 0; j < num_close; ++j) close[j] = dist[idx[j]];
    std::sort(close, close + num_close);
    return close[(num_close - 1) / 2];
}

void extract_features(const Frame& frame, const Image<uint32_t>& ltp,
                      const BackgroundModel& model, int num_close, FeatureMaps& out) {
    const int w = frame.rgb.width(), h = frame.rgb.height();
    const int n = model.num_samples();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Rgb obs = frame.rgb.at(x, y);
            const auto [bv, cv] = extract_color_features(
                obs, model.color_r(x, y), model.color_g(x, y), model.color_b(x, y), n, num_close);
            out.bv.at(x, y) = bv;
            out.cv.at(x, y) = cv;
            out.tv.at(x, y) = extract_texture_feature(ltp.at(x, y), model.textures(x, y), n, num_close);
        }
    }
}

}  // namespace m4cd
