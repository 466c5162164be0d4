#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "m4cd/mrf.hpp"

using namespace m4cd;

namespace {

// independent recount of all five energy terms
double naive_energy(const TwoLayerGraph& g, const Labeling& l) {
    double e = 0.0;
    const int w = g.width, h = g.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = size_t(y) * w + x;
            e += g.pixel_cost[i][l.pixel[i]];
            if (x + 1 < w && l.pixel[i] != l.pixel[i + 1])
                e += g.hweight[size_t(y) * (w - 1) + x];
            if (y + 1 < h && l.pixel[i] != l.pixel[i + size_t(w)])
                e += g.vweight[size_t(y) * w + x];
            if (g.membership[i] >= 0 && l.pixel[i] != l.superpixel[size_t(g.membership[i])])
                e += g.psi;
        }
    for (int s = 0; s < g.num_superpixels; ++s) e += g.sp_cost[size_t(s)][l.superpixel[size_t(s)]];
    for (const auto& [a, b] : g.sp_edges)
        if (l.superpixel[size_t(a)] != l.superpixel[size_t(b)]) e += g.xi;
    return e;
}

std::mt19937 eng(4242);
double runif(double lo, double hi) {
    return lo + (hi - lo) * (eng() / double(std::mt19937::max()));
}

TwoLayerGraph random_graph(int w, int h, int ns, double pair_scale) {
    TwoLayerGraph g;
    g.width = w;
    g.height = h;
    g.num_superpixels = ns;
    const size_t n = g.num_pixels();
    g.pixel_cost.resize(n);
    for (auto& c : g.pixel_cost) c = {runif(0.0, 5.0), runif(0.0, 5.0)};
    g.sp_cost.resize(size_t(ns));
    for (auto& c : g.sp_cost) c = {runif(0.0, 5.0), runif(0.0, 5.0)};
    g.hweight.resize(size_t(std::max(0, w - 1)) * h);
    for (auto& v : g.hweight) v = runif(0.0, pair_scale);
    g.vweight.resize(size_t(w) * std::max(0, h - 1));
    for (auto& v : g.vweight) v = runif(0.0, pair_scale);
    g.membership.resize(n);
    for (auto& m : g.membership) m = ns > 0 ? int32_t(eng() % uint32_t(ns + 1)) - 1 : -1;
    if (ns == 2 && eng() % 2) g.sp_edges.emplace_back(0, 1);
    g.xi = runif(0.0, pair_scale);
    g.psi = runif(0.0, pair_scale);
    return g;
}

Labeling decode(const TwoLayerGraph& g, unsigned bits) {
    Labeling l;
    l.pixel.resize(g.num_pixels());
    l.superpixel.resize(size_t(g.num_superpixels));
    for (size_t i = 0; i < l.pixel.size(); ++i) l.pixel[i] = (bits >> i) & 1;
    for (size_t s = 0; s < l.superpixel.size(); ++s)
        l.superpixel[s] = (bits >> (l.pixel.size() + s)) & 1;
    return l;
}

double exhaustive_min(const TwoLayerGraph& g) {
    const unsigned vars = unsigned(g.num_pixels()) + unsigned(g.num_superpixels);
    double best = std::numeric_limits<double>::max();
    for (unsigned bits = 0; bits < (1u << vars); ++bits)
        best = std::min(best, energy(g, decode(g, bits)));
    return best;
}

Labeling constant_labeling(const TwoLayerGraph& g, uint8_t v) {
    Labeling l;
    l.pixel.assign(g.num_pixels(), v);
    l.superpixel.assign(size_t(g.num_superpixels), v);
    return l;
}

SuperpixelMap trivial_spmap(int w, int h) {
    SuperpixelMap sp;
    sp.labels = Image<int32_t>(w, h, 0);
    sp.count = 1;
    for (int i = 0; i < w * h; ++i) sp.members.push_back({});
    sp.members.assign(1, {});
    for (int32_t i = 0; i < w * h; ++i) sp.members[0].push_back(i);
    sp.neighbors.assign(1, {});
    return sp;
}

}  // namespace

TEST_CASE("graph construction from a flat posterior") {
    PipelineConfig cfg;
    const int w = 4, h = 3;
    Image<double> post(w, h, 0.5);
    RgbImage frame(w, h);
    frame.fill(Rgb{100, 100, 100});
    const SuperpixelMap sp = trivial_spmap(w, h);
    const TwoLayerGraph g = build_graph(post, frame, sp, cfg);

    const double log2 = std::log(2.0);
    for (const auto& c : g.pixel_cost) {
        CHECK(c[0] == doctest::Approx(log2));
        CHECK(c[1] == doctest::Approx(log2));
    }
    CHECK(g.sp_cost[0][0] == doctest::Approx(w * h * log2));
    CHECK(g.sp_cost[0][1] == doctest::Approx(w * h * log2));
    // identical neighboring colors: full pairwise weight phi
    for (double v : g.hweight) CHECK(v == doctest::Approx(30.0));
    for (double v : g.vweight) CHECK(v == doctest::Approx(30.0));
    CHECK(g.xi == 150.0);
    CHECK(g.psi == 5.0);
}

TEST_CASE("pairwise weight decays with the color difference") {
    PipelineConfig cfg;
    Image<double> post(2, 1, 0.5);
    RgbImage frame(2, 1);
    frame.at(0, 0) = Rgb{100, 100, 100};
    frame.at(1, 0) = Rgb{120, 100, 100};  // squared distance 400 = sigma
    const TwoLayerGraph g = build_graph(post, frame, trivial_spmap(2, 1), cfg);
    CHECK(g.hweight[0] == doctest::Approx(30.0 * std::exp(-1.0)));
    CHECK(g.hweight[0] == doctest::Approx(11.04).epsilon(1e-3));
}

TEST_CASE("graph construction rejects mismatched inputs") {
    PipelineConfig cfg;
    Image<double> post(3, 3, 0.5);
    RgbImage frame(4, 3);
    CHECK_THROWS_AS(build_graph(post, frame, trivial_spmap(3, 3), cfg), std::runtime_error);
}

TEST_CASE("energy matches an independent recount on random graphs") {
    for (int trial = 0; trial < 1000; ++trial) {
        const TwoLayerGraph g = random_graph(1 + int(eng() % 3), 1 + int(eng() % 3),
                                             int(eng() % 3), 3.0);
        const unsigned vars = unsigned(g.num_pixels()) + unsigned(g.num_superpixels);
        const Labeling l = decode(g, eng() % (1u << vars));
        CHECK(energy(g, l) == doctest::Approx(naive_energy(g, l)).epsilon(1e-12));
    }
}

TEST_CASE("flipping one pixel changes the energy by its local terms") {
    const TwoLayerGraph g = random_graph(3, 3, 2, 2.0);
    Labeling l = decode(g, 0b10110101101u & ((1u << 11) - 1));
    const double before = energy(g, l);
    const size_t i = 4;  // center pixel
    l.pixel[i] ^= 1;
    CHECK(energy(g, l) == doctest::Approx(naive_energy(g, l)).epsilon(1e-12));
    CHECK(energy(g, l) != doctest::Approx(before));  // data costs are generic
}

TEST_CASE("with all pairwise terms off BP returns the pointwise argmin") {
    for (int trial = 0; trial < 20; ++trial) {
        TwoLayerGraph g = random_graph(3, 3, 2, 0.0);
        g.xi = g.psi = 0.0;
        const BpResult r = loopy_bp(g, 50, 1e-6, 0.5);
        CHECK(r.converged);
        for (size_t i = 0; i < g.num_pixels(); ++i) {
            const uint8_t expect = g.pixel_cost[i][1] < g.pixel_cost[i][0] ? 1 : 0;
            CHECK(r.labeling.pixel[i] == expect);
        }
        for (int s = 0; s < g.num_superpixels; ++s) {
            const uint8_t expect = g.sp_cost[size_t(s)][1] < g.sp_cost[size_t(s)][0] ? 1 : 0;
            CHECK(r.labeling.superpixel[size_t(s)] == expect);
        }
        CHECK(r.final_energy == doctest::Approx(exhaustive_min(g)).epsilon(1e-9));
    }
}

TEST_CASE("min-sum BP is exact on an acyclic chain") {
    for (int trial = 0; trial < 50; ++trial) {
        const TwoLayerGraph g = random_graph(3, 1, 0, 4.0);  // a 3-node chain, no loops
        const BpResult r = loopy_bp(g, 100, 1e-9, 0.0);
        CHECK(r.final_energy == doctest::Approx(exhaustive_min(g)).epsilon(1e-9));
    }
}

TEST_CASE("BP stays within a few percent of the exhaustive optimum") {
    int good = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        const TwoLayerGraph g = random_graph(2 + int(eng() % 2), 2, int(eng() % 3), 1.5);
        const BpResult r = loopy_bp(g, 50, 1e-4, 0.5);
        const double opt = exhaustive_min(g);
        CHECK(r.final_energy >= opt - 1e-9);
        if (r.final_energy <= 1.05 * opt + 1e-9) ++good;
        // never worse than the trivial labelings on data-dominated instances
        CHECK(r.final_energy <= std::max(energy(g, constant_labeling(g, 0)),
                                         energy(g, constant_labeling(g, 1))) + 1e-9);
    }
    CHECK(good >= trials * 9 / 10);
}

TEST_CASE("convergence bookkeeping") {
    TwoLayerGraph g = random_graph(3, 3, 1, 1.0);
    const BpResult r = loopy_bp(g, 50, 1e-4, 0.5);
    CHECK(r.iterations >= 1);
    CHECK(r.iterations <= 50);
    if (r.converged) CHECK(r.final_delta < 1e-4);
    const BpResult r2 = loopy_bp(g, 1, 1e-12, 0.5);
    CHECK(r2.iterations == 1);
}

TEST_CASE("small foreground specks are removed") {
    LabelMask mask(20, 20, kBackground);
    mask.at(5, 5) = kForeground;                       // lone pixel
    for (int x = 10; x < 14; ++x) mask.at(x, 10) = kForeground;  // 4-px strip
    post_process(mask, 25);
    for (size_t i = 0; i < mask.size(); ++i) CHECK(mask[i] == kBackground);
}

TEST_CASE("area removal is strict at the threshold") {
    auto blob = [](int count) {
        LabelMask mask(30, 30, kBackground);
        // a 5-wide snake of `count` pixels, 8-connected as one region
        for (int i = 0; i < count; ++i) mask.at(3 + i % 5, 3 + i / 5) = kForeground;
        post_process(mask, 25);
        int kept = 0;
        for (size_t i = 0; i < mask.size(); ++i) kept += mask[i] ? 1 : 0;
        return kept;
    };
    CHECK(blob(24) == 0);   // under the threshold: removed
    CHECK(blob(25) == 25);  // at the threshold: kept
}

TEST_CASE("diagonally linked pixels form one 8-connected region") {
    LabelMask mask(40, 40, kBackground);
    // a diagonal line of 26 pixels: 8-connected, above the threshold
    for (int i = 0; i < 26; ++i) mask.at(5 + i, 5 + i) = kForeground;
    post_process(mask, 25);
    int kept = 0;
    for (size_t i = 0; i < mask.size(); ++i) kept += mask[i] ? 1 : 0;
    CHECK(kept == 26);
}

TEST_CASE("interior holes below the threshold are filled") {
    LabelMask mask(20, 20, kBackground);
    for (int y = 4; y < 14; ++y)
        for (int x = 4; x < 14; ++x) mask.at(x, y) = kForeground;
    for (int y = 7; y < 10; ++y)
        for (int x = 7; x < 10; ++x) mask.at(x, y) = kBackground;  // 9-px hole
    post_process(mask, 25);
    for (int y = 4; y < 14; ++y)
        for (int x = 4; x < 14; ++x) CHECK(mask.at(x, y) == kForeground);
    CHECK(mask.at(0, 0) == kBackground);  // outside untouched
}

TEST_CASE("background touching the border is never treated as a hole") {
    LabelMask mask(10, 10, kForeground);
    for (int y = 0; y < 5; ++y) mask.at(0, y) = kBackground;  // touches the border
    post_process(mask, 25);
    for (int y = 0; y < 5; ++y) CHECK(mask.at(0, y) == kBackground);
}

TEST_CASE("post-processing is idempotent") {
    std::mt19937 local(11);
    for (int trial = 0; trial < 20; ++trial) {
        LabelMask mask(32, 24);
        for (auto& v : mask.data()) v = (local() % 4 == 0) ? kForeground : kBackground;
        post_process(mask, 25);
        LabelMask again = mask;
        post_process(again, 25);
        CHECK(again == mask);
    }
}
