#include "m4cd/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace m4cd {

TwoLayerGraph build_graph(const Image<double>& posterior_fg, const RgbImage& frame,
                          const SuperpixelMap& spmap, const PipelineConfig& cfg) {
    if (!posterior_fg.same_size(frame) || !posterior_fg.same_size(spmap.labels))
        throw std::runtime_error("build_graph: dimension mismatch");

    TwoLayerGraph g;
    g.width = posterior_fg.width();
    g.height = posterior_fg.height();
    g.num_superpixels = spmap.count;
    g.xi = cfg.mrf_xi;
    g.psi = cfg.mrf_psi;

    const size_t n = g.num_pixels();
    g.pixel_cost.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double p = posterior_fg[i];
        g.pixel_cost[i] = {-std::log(1.0 - p), -std::log(p)};  // D(0), D(1)
    }

    g.sp_cost.assign(size_t(spmap.count), {0.0, 0.0});
    g.membership.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const int32_t s = spmap.labels[i];
        g.membership[i] = s;
        g.sp_cost[size_t(s)][0] += g.pixel_cost[i][0];
        g.sp_cost[size_t(s)][1] += g.pixel_cost[i][1];
    }
    g.sp_edges = spmap.adjacency;

    const int w = g.width, h = g.height;
    g.hweight.resize(size_t(std::max(0, w - 1)) * h);
    g.vweight.resize(size_t(w) * std::max(0, h - 1));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x)
            g.hweight[size_t(y) * (w - 1) + x] =
                cfg.mrf_phi * std::exp(-rgb_dist_sq(frame.at(x, y), frame.at(x + 1, y)) / cfg.mrf_sigma);
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x)
            g.vweight[size_t(y) * w + x] =
                cfg.mrf_phi * std::exp(-rgb_dist_sq(frame.at(x, y), frame.at(x, y + 1)) / cfg.mrf_sigma);
    return g;
}

double energy(const TwoLayerGraph& g, const Labeling& l) {
    double e = 0.0;
    const int w = g.width, h = g.height;
    for (size_t i = 0; i < g.num_pixels(); ++i) e += g.pixel_cost[i][l.pixel[i]];
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x)
            if (l.pixel[size_t(y) * w + x] != l.pixel[size_t(y) * w + x + 1])
                e += g.hweight[size_t(y) * (w - 1) + x];
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x)
            if (l.pixel[size_t(y) * w + x] != l.pixel[size_t(y + 1) * w + x])
                e += g.vweight[size_t(y) * w + x];
    for (int s = 0; s < g.num_superpixels; ++s) e += g.sp_cost[size_t(s)][l.superpixel[size_t(s)]];
    for (const auto& [a, b] : g.sp_edges)
        if (l.superpixel[size_t(a)] != l.superpixel[size_t(b)]) e += g.xi;
    for (size_t i = 0; i < g.num_pixels(); ++i)
        if (g.membership[i] >= 0 && l.pixel[i] != l.superpixel[size_t(g.membership[i])])
            e += g.psi;
    return e;
}

namespace {

using Msg = std::array<double, 2>;

inline Msg potts_message(const Msg& belief, double cost) {
    Msg m{std::min(belief[0], belief[1] + cost), std::min(belief[1], belief[0] + cost)};
    const double lo = std::min(m[0], m[1]);
    m[0] -= lo;
    m[1] -= lo;
    return m;
}

inline double combine(Msg& stored, const Msg& computed, double damping) {
    Msg next{damping * stored[0] + (1.0 - damping) * computed[0],
             damping * stored[1] + (1.0 - damping) * computed[1]};
    const double lo = std::min(next[0], next[1]);
    next[0] -= lo;
    next[1] -= lo;
    const double old_norm = std::max(std::abs(stored[0]), std::abs(stored[1]));
    const double delta = std::max(std::abs(next[0] - stored[0]), std::abs(next[1] - stored[1]));
    stored = next;
    return delta / (1.0 + old_norm);
}

}  // namespace

BpResult loopy_bp(const TwoLayerGraph& g, int max_iters, double tol, double damping) {
    const int w = g.width, h = g.height;
    const size_t n = g.num_pixels();
    const size_t ns = size_t(g.num_superpixels);
    const size_t ne = g.sp_edges.size();

    // incoming messages, double-buffered; directions into a pixel:
    // 0 from left, 1 from right, 2 from above, 3 from below
    std::array<std::vector<Msg>, 2> px{std::vector<Msg>(4 * n, Msg{0, 0}),
                                       std::vector<Msg>(4 * n, Msg{0, 0})};
    std::array<std::vector<Msg>, 2> sp_to_px{std::vector<Msg>(n, Msg{0, 0}),
                                             std::vector<Msg>(n, Msg{0, 0})};
    std::array<std::vector<Msg>, 2> px_to_sp{std::vector<Msg>(n, Msg{0, 0}),
                                             std::vector<Msg>(n, Msg{0, 0})};
    // directed superpixel edges: 2e = a->b, 2e+1 = b->a
    std::array<std::vector<Msg>, 2> spsp{std::vector<Msg>(2 * ne, Msg{0, 0}),
                                         std::vector<Msg>(2 * ne, Msg{0, 0})};

    // per-superpixel incoming directed-edge list
    std::vector<std::vector<int32_t>> sp_in(ns);
    for (size_t e = 0; e < ne; ++e) {
        sp_in[size_t(g.sp_edges[e].second)].push_back(int32_t(2 * e));      // a->b arrives at b
        sp_in[size_t(g.sp_edges[e].first)].push_back(int32_t(2 * e + 1));   // b->a arrives at a
    }
    std::vector<std::vector<int32_t>> sp_members(ns);
    for (size_t i = 0; i < n; ++i)
        if (g.membership[i] >= 0) sp_members[size_t(g.membership[i])].push_back(int32_t(i));

    auto pixel_sum = [&](const std::vector<Msg>& pxbuf, const std::vector<Msg>& spbuf, size_t i) {
        Msg s{g.pixel_cost[i][0], g.pixel_cost[i][1]};
        for (int d = 0; d < 4; ++d) {
            s[0] += pxbuf[4 * i + size_t(d)][0];
            s[1] += pxbuf[4 * i + size_t(d)][1];
        }
        if (g.membership[i] >= 0) {
            s[0] += spbuf[i][0];
            s[1] += spbuf[i][1];
        }
        return s;
    };
    auto sp_sum = [&](const std::vector<Msg>& pxspbuf, const std::vector<Msg>& spspbuf, size_t s) {
        Msg b{g.sp_cost[s][0], g.sp_cost[s][1]};
        for (int32_t p : sp_members[s]) {
            b[0] += pxspbuf[size_t(p)][0];
            b[1] += pxspbuf[size_t(p)][1];
        }
        for (int32_t e : sp_in[s]) {
            b[0] += spspbuf[size_t(e)][0];
            b[1] += spspbuf[size_t(e)][1];
        }
        return b;
    };
    auto edge_weight = [&](size_t i, int dir) {
        const int x = int(i) % w, y = int(i) / w;
        switch (dir) {
            case 0: return g.hweight[size_t(y) * (w - 1) + x - 1];  // to the left
            case 1: return g.hweight[size_t(y) * (w - 1) + x];      // to the right
            case 2: return g.vweight[size_t(y - 1) * w + x];        // upward
            default: return g.vweight[size_t(y) * w + x];           // downward
        }
    };

    int cur = 0;
    BpResult result;
    for (int iter = 0; iter < max_iters; ++iter) {
        const int nxt = 1 - cur;
        // carry over, then overwrite with the damped update
        px[nxt] = px[cur];
        sp_to_px[nxt] = sp_to_px[cur];
        px_to_sp[nxt] = px_to_sp[cur];
        spsp[nxt] = spsp[cur];
        double max_delta = 0.0;

        for (size_t i = 0; i < n; ++i) {
            const int x = int(i) % w, y = int(i) / w;
            const Msg base = pixel_sum(px[cur], sp_to_px[cur], i);
            // to each 4-neighbor: exclude that neighbor's own message
            struct Dir { int dx, dy, into; };  // `into` = slot at the receiver
            static constexpr Dir dirs[4] = {{-1, 0, 1}, {1, 0, 0}, {0, -1, 3}, {0, 1, 2}};
            for (int d = 0; d < 4; ++d) {
                const int qx = x + dirs[d].dx, qy = y + dirs[d].dy;
                if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
                const Msg& in = px[cur][4 * i + size_t(d)];
                const Msg b{base[0] - in[0], base[1] - in[1]};
                const Msg m = potts_message(b, edge_weight(i, d));
                const size_t q = size_t(qy) * w + qx;
                max_delta = std::max(max_delta,
                                     combine(px[nxt][4 * q + size_t(dirs[d].into)], m, damping));
            }
            if (g.membership[i] >= 0) {
                const Msg& in = sp_to_px[cur][i];
                const Msg b{base[0] - in[0], base[1] - in[1]};
                const Msg m = potts_message(b, g.psi);
                max_delta = std::max(max_delta, combine(px_to_sp[nxt][i], m, damping));
            }
        }

        for (size_t s = 0; s < ns; ++s) {
            const Msg base = sp_sum(px_to_sp[cur], spsp[cur], s);
            for (int32_t p : sp_members[s]) {
                const Msg& in = px_to_sp[cur][size_t(p)];
                const Msg b{base[0] - in[0], base[1] - in[1]};
                const Msg m = potts_message(b, g.psi);
                max_delta = std::max(max_delta, combine(sp_to_px[nxt][size_t(p)], m, damping));
            }
            for (int32_t e : sp_in[s]) {
                // reply along the reverse direction of incoming edge e
                const Msg& in = spsp[cur][size_t(e)];
                const Msg b{base[0] - in[0], base[1] - in[1]};
                const Msg m = potts_message(b, g.xi);
                const size_t reverse = size_t(e ^ 1);
                max_delta = std::max(max_delta, combine(spsp[nxt][reverse], m, damping));
            }
        }

        cur = nxt;
        result.iterations = iter + 1;
        result.final_delta = max_delta;
        if (max_delta < tol) {
            result.converged = true;
            break;
        }
    }

    result.labeling.pixel.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Msg b = pixel_sum(px[cur], sp_to_px[cur], i);
        result.labeling.pixel[i] = b[1] < b[0] ? 1 : 0;  // ties toward background
    }
    result.labeling.superpixel.resize(ns);
    for (size_t s = 0; s < ns; ++s) {
        const Msg b = sp_sum(px_to_sp[cur], spsp[cur], s);
        result.labeling.superpixel[s] = b[1] < b[0] ? 1 : 0;
    }
    result.final_energy = energy(g, result.labeling);
    return result;
}

}  // namespace m4cd
