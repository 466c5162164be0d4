#pragma once

#include <array>
#include <vector>

#include "m4cd/config.hpp"
#include "m4cd/image.hpp"
#include "m4cd/superpixels.hpp"

namespace m4cd {

// Two-layer graph: a 4-connected pixel grid, a superpixel adjacency layer,
// and one membership edge per pixel. Pixels whose superpixel id is negative
// carry no membership edge (used by the small test instances).
struct TwoLayerGraph {
    int width = 0, height = 0;
    int num_superpixels = 0;

    std::vector<std::array<double, 2>> pixel_cost;  // D(l), row-major
    std::vector<std::array<double, 2>> sp_cost;     // C(l)

    // Potts weight per pixel edge: phi * Z(color difference)
    std::vector<double> hweight;  // (width-1) x height, edge (x,y)-(x+1,y)
    std::vector<double> vweight;  // width x (height-1), edge (x,y)-(x,y+1)

    std::vector<int32_t> membership;  // pixel -> superpixel id, -1 for none
    std::vector<std::pair<int32_t, int32_t>> sp_edges;

    double xi = 0.0;   // superpixel-pair disagreement cost
    double psi = 0.0;  // inter-layer disagreement cost

    size_t num_pixels() const { return size_t(width) * height; }
};

struct Labeling {
    std::vector<uint8_t> pixel;  // 0/1
    std::vector<uint8_t> superpixel;
};

TwoLayerGraph build_graph(const Image<double>& posterior_fg, const RgbImage& frame,
                          const SuperpixelMap& spmap, const PipelineConfig& cfg);

// Exact evaluation of the five-term energy.
double energy(const TwoLayerGraph& g, const Labeling& l);

struct BpResult {
    Labeling labeling;
    int iterations = 0;
    double final_delta = 0.0;
    double final_energy = 0.0;
    bool converged = false;
};

// Min-sum loopy BP: synchronous schedule, damped, messages normalized to a
// zero minimum component; argmin beliefs with ties toward background.
BpResult loopy_bp(const TwoLayerGraph& g, int max_iters, double tol, double damping);

// Area filter (drop 8-connected foreground regions under the threshold) then
// hole filling (fill enclosed 4-connected background regions under it).
void post_process(LabelMask& mask, int area_threshold);

}  // namespace m4cd
