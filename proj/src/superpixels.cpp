#include "m4cd/superpixels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace m4cd {

namespace {

struct Center {
    double x, y;
    double r, g, b;
};

// squared color gradient at (x, y), clamped sampling
double gradient(const RgbImage& img, int x, int y) {
    const int w = img.width(), h = img.height();
    const Rgb xl = img.at(clamp_int(x - 1, 0, w - 1), y);
    const Rgb xr = img.at(clamp_int(x + 1, 0, w - 1), y);
    const Rgb yu = img.at(x, clamp_int(y - 1, 0, h - 1));
    const Rgb yd = img.at(x, clamp_int(y + 1, 0, h - 1));
    return double(rgb_dist_sq(xr, xl)) + double(rgb_dist_sq(yd, yu));
}

void build_membership(SuperpixelMap& map) {
    const auto& labels = map.labels;
    const int w = labels.width(), h = labels.height();
    map.members.assign(size_t(map.count), {});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            map.members[size_t(labels.at(x, y))].push_back(y * w + x);

    map.adjacency.clear();
    map.neighbors.assign(size_t(map.count), {});
    auto add_edge = [&map](int32_t a, int32_t b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        map.adjacency.emplace_back(a, b);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) add_edge(labels.at(x, y), labels.at(x + 1, y));
            if (y + 1 < h) add_edge(labels.at(x, y), labels.at(x, y + 1));
        }
    }
    std::sort(map.adjacency.begin(), map.adjacency.end());
    map.adjacency.erase(std::unique(map.adjacency.begin(), map.adjacency.end()),
                        map.adjacency.end());
    for (const auto& [a, b] : map.adjacency) {
        map.neighbors[size_t(a)].push_back(b);
        map.neighbors[size_t(b)].push_back(a);
    }
}

// Splits label regions into 4-connected components and absorbs orphans
// (everything but each label's largest component), smallest orphan first,
// into the largest adjacent superpixel (tie: lower id). A pass merges every
// orphan of its flood fill; passes repeat until each label is connected,
// which is guaranteed because every merge joins two components.
void enforce_connectivity(Image<int32_t>& labels, int num_labels) {
    const int w = labels.width(), h = labels.height();
    const size_t total = labels.size();
    std::vector<int32_t> comp(total);
    std::vector<int32_t> comp_label;
    std::vector<std::vector<int32_t>> comp_pixels;
    std::vector<int32_t> stack;

    for (;;) {
        std::fill(comp.begin(), comp.end(), -1);
        comp_label.clear();
        comp_pixels.clear();
        for (size_t start = 0; start < total; ++start) {
            if (comp[start] >= 0) continue;
            const int32_t id = int32_t(comp_label.size());
            const int32_t lab = labels[start];
            comp_label.push_back(lab);
            comp_pixels.emplace_back();
            stack.push_back(int32_t(start));
            comp[start] = id;
            while (!stack.empty()) {
                const int32_t p = stack.back();
                stack.pop_back();
                comp_pixels[size_t(id)].push_back(p);
                const int x = p % w, y = p / w;
                const int nb[4] = {x > 0 ? p - 1 : -1, x + 1 < w ? p + 1 : -1,
                                   y > 0 ? p - w : -1, y + 1 < h ? p + w : -1};
                for (int q : nb) {
                    if (q >= 0 && comp[size_t(q)] < 0 && labels[size_t(q)] == lab) {
                        comp[size_t(q)] = id;
                        stack.push_back(q);
                    }
                }
            }
        }

        // main component per label = the largest (tie: first encountered)
        std::vector<int32_t> main_comp(size_t(num_labels), -1);
        for (size_t c = 0; c < comp_label.size(); ++c) {
            const int32_t lab = comp_label[c];
            if (main_comp[size_t(lab)] < 0 ||
                comp_pixels[c].size() > comp_pixels[size_t(main_comp[size_t(lab)])].size())
                main_comp[size_t(lab)] = int32_t(c);
        }

        // orphans of this pass, smallest first (tie: lowest component id)
        std::vector<int32_t> orphans;
        for (size_t c = 0; c < comp_label.size(); ++c)
            if (main_comp[size_t(comp_label[c])] != int32_t(c)) orphans.push_back(int32_t(c));
        if (orphans.empty()) return;
        std::sort(orphans.begin(), orphans.end(), [&](int32_t a, int32_t b) {
            if (comp_pixels[size_t(a)].size() != comp_pixels[size_t(b)].size())
                return comp_pixels[size_t(a)].size() < comp_pixels[size_t(b)].size();
            return a < b;
        });

        std::vector<int64_t> label_size(size_t(num_labels), 0);
        for (size_t p = 0; p < total; ++p) ++label_size[size_t(labels[p])];

        for (int32_t c : orphans) {
            int32_t best = -1;
            for (int32_t p : comp_pixels[size_t(c)]) {
                const int x = p % w, y = p / w;
                const int nb[4] = {x > 0 ? p - 1 : -1, x + 1 < w ? p + 1 : -1,
                                   y > 0 ? p - w : -1, y + 1 < h ? p + w : -1};
                for (int q : nb) {
                    if (q < 0 || comp[size_t(q)] == c) continue;
                    const int32_t lab = labels[size_t(q)];
                    if (best < 0 || label_size[size_t(lab)] > label_size[size_t(best)] ||
                        (label_size[size_t(lab)] == label_size[size_t(best)] && lab < best))
                        best = lab;
                }
            }
            if (best < 0) continue;  // surrounded by its own label only
            label_size[size_t(comp_label[size_t(c)])] -= int64_t(comp_pixels[size_t(c)].size());
            label_size[size_t(best)] += int64_t(comp_pixels[size_t(c)].size());
            for (int32_t p : comp_pixels[size_t(c)]) labels[size_t(p)] = best;
            comp_label[size_t(c)] = best;
        }
    }
}

}  // namespace

SuperpixelMap slic_segment(const RgbImage& img, int region_size,
                           double compactness, int iterations) {
    const int w = img.width(), h = img.height();
    if (w <= 0 || h <= 0) throw std::runtime_error("slic: empty image");

    SuperpixelMap map;
    map.labels = Image<int32_t>(w, h, 0);

    if (w < region_size && h < region_size) {
        map.count = 1;
        build_membership(map);
        return map;
    }

    const int nx = std::max(1, w / region_size);
    const int ny = std::max(1, h / region_size);
    const double sx = double(w) / nx;
    const double sy = double(h) / ny;

    std::vector<Center> centers;
    centers.reserve(size_t(nx) * ny);
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            int cx = int((gx + 0.5) * sx);
            int cy = int((gy + 0.5) * sy);
            cx = clamp_int(cx, 0, w - 1);
            cy = clamp_int(cy, 0, h - 1);
            // perturb to the lowest-gradient position in the 3x3 neighborhood
            double best_grad = std::numeric_limits<double>::max();
            int bx = cx, by = cy;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int px = cx + dx, py = cy + dy;
                    if (px < 0 || px >= w || py < 0 || py >= h) continue;
                    const double g = gradient(img, px, py);
                    if (g < best_grad) {
                        best_grad = g;
                        bx = px;
                        by = py;
                    }
                }
            }
            const Rgb c = img.at(bx, by);
            centers.push_back({double(bx), double(by), double(c.r), double(c.g), double(c.b)});
        }
    }

    const double spatial_scale = compactness * compactness / double(region_size * region_size);
    const int win_x = int(std::ceil(sx)) + 1;
    const int win_y = int(std::ceil(sy)) + 1;
    std::vector<double> best_dist(size_t(w) * h);
    auto& labels = map.labels;

    for (int iter = 0; iter < iterations; ++iter) {
        std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::max());
        std::fill(labels.data().begin(), labels.data().end(), -1);
        for (size_t ci = 0; ci < centers.size(); ++ci) {
            const Center& c = centers[ci];
            const int x0 = std::max(0, int(c.x) - win_x), x1 = std::min(w - 1, int(c.x) + win_x);
            const int y0 = std::max(0, int(c.y) - win_y), y1 = std::min(h - 1, int(c.y) + win_y);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const Rgb px = img.at(x, y);
                    const double dr = px.r - c.r, dg = px.g - c.g, db = px.b - c.b;
                    const double dx = x - c.x, dy = y - c.y;
                    const double d = dr * dr + dg * dg + db * db +
                                     (dx * dx + dy * dy) * spatial_scale;
                    double& bd = best_dist[size_t(y) * w + x];
                    if (d < bd) {
                        bd = d;
                        labels.at(x, y) = int32_t(ci);
                    }
                }
            }
        }
        // pixels outside every window: nearest center spatially
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (labels.at(x, y) >= 0) continue;
                double best = std::numeric_limits<double>::max();
                int32_t bi = 0;
                for (size_t ci = 0; ci < centers.size(); ++ci) {
                    const double dx = x - centers[ci].x, dy = y - centers[ci].y;
                    const double d = dx * dx + dy * dy;
                    if (d < best) {
                        best = d;
                        bi = int32_t(ci);
                    }
                }
                labels.at(x, y) = bi;
            }
        }
        // center update
        std::vector<double> acc(centers.size() * 6, 0.0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t ci = size_t(labels.at(x, y));
                double* a = acc.data() + ci * 6;
                const Rgb px = img.at(x, y);
                a[0] += x;
                a[1] += y;
                a[2] += px.r;
                a[3] += px.g;
                a[4] += px.b;
                a[5] += 1.0;
            }
        }
        for (size_t ci = 0; ci < centers.size(); ++ci) {
            const double* a = acc.data() + ci * 6;
            if (a[5] < 1.0) continue;
            centers[ci] = {a[0] / a[5], a[1] / a[5], a[2] / a[5], a[3] / a[5], a[4] / a[5]};
        }
    }

    enforce_connectivity(labels, int(centers.size()));

    // relabel contiguous, 0-based, in first-appearance (row-major) order
    std::vector<int32_t> remap(centers.size(), -1);
    int32_t next = 0;
    for (size_t p = 0; p < labels.size(); ++p) {
        int32_t& l = labels[p];
        if (remap[size_t(l)] < 0) remap[size_t(l)] = next++;
        l = remap[size_t(l)];
    }
    map.count = next;
    build_membership(map);
    return map;
}

}  // namespace m4cd
