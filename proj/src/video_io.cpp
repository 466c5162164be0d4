#include "m4cd/video_io.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "m4cd/kernels.hpp"

namespace fs = std::filesystem;

namespace m4cd {

uint8_t to_gray(const Rgb& c) {
    return uint8_t((299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000);
}

GrayImage to_gray(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    if (!img.empty()) {
        const auto& k = kernels::active();
        k.luma_row(reinterpret_cast<const uint8_t*>(img.data().data()),
                   int(img.size()), out.data().data());
    }
    return out;
}

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

RgbImage from_cv(const cv::Mat& m) {
    RgbImage out(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const cv::Vec3b* src = m.ptr<cv::Vec3b>(y);
        Rgb* dst = out.row(y);
        for (int x = 0; x < m.cols; ++x)
            dst[x] = Rgb{src[x][2], src[x][1], src[x][0]};  // BGR -> RGB
    }
    return out;
}

}  // namespace

RgbImage load_rgb(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw std::runtime_error("cannot read image: " + path);
    return from_cv(m);
}

GrayImage load_gray(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw std::runtime_error("cannot read image: " + path);
    GrayImage out(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        std::copy_n(m.ptr<uint8_t>(y), m.cols, out.row(y));
    return out;
}

void write_rgb(const RgbImage& img, const std::string& path) {
    cv::Mat m(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        cv::Vec3b* dst = m.ptr<cv::Vec3b>(y);
        const Rgb* src = img.row(y);
        for (int x = 0; x < img.width(); ++x)
            dst[x] = cv::Vec3b(src[x].b, src[x].g, src[x].r);
    }
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write image: " + path);
}

void write_gray(const GrayImage& img, const std::string& path) {
    cv::Mat m(img.height(), img.width(), CV_8UC1);
    for (int y = 0; y < img.height(); ++y)
        std::copy_n(img.row(y), img.width(), m.ptr<uint8_t>(y));
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write image: " + path);
}

FrameSequence::FrameSequence(const std::string& directory) {
    fs::path dir(directory);
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + directory);
    // CDnet layout keeps frames under input/
    if (fs::is_directory(dir / "input")) dir /= "input";
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            paths_.push_back(entry.path().string());
    std::sort(paths_.begin(), paths_.end());
    if (paths_.empty())
        throw std::runtime_error("no frames found in " + dir.string());
    const RgbImage first = load_rgb(paths_.front());
    width_ = first.width();
    height_ = first.height();
}

Frame FrameSequence::load(int index) const {
    if (index < 1 || index > count())
        throw std::runtime_error("frame index out of range: " + std::to_string(index));
    Frame f;
    f.index = index;
    f.rgb = load_rgb(paths_[size_t(index - 1)]);
    if (f.rgb.width() != width_ || f.rgb.height() != height_)
        throw std::runtime_error("frame " + std::to_string(index) + " (" +
                                 paths_[size_t(index - 1)] + ") has dimensions " +
                                 std::to_string(f.rgb.width()) + "x" + std::to_string(f.rgb.height()) +
                                 ", expected " + std::to_string(width_) + "x" + std::to_string(height_));
    f.gray = to_gray(f.rgb);
    return f;
}

void write_mask(const LabelMask& mask, const std::string& path) {
    cv::Mat m(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        uint8_t* dst = m.ptr<uint8_t>(y);
        const uint8_t* src = mask.row(y);
        for (int x = 0; x < mask.width(); ++x) dst[x] = src[x] ? kForeground : kBackground;
    }
    if (!cv::imwrite(path, m))
        throw std::runtime_error("cannot write mask: " + path);
}

LabelMask load_mask(const std::string& path) {
    GrayImage g = load_gray(path);
    LabelMask out(g.width(), g.height());
    for (size_t i = 0; i < g.size(); ++i) out[i] = g[i] >= 128 ? kForeground : kBackground;
    return out;
}

GroundTruthMask load_groundtruth(const std::string& path) {
    GrayImage g = load_gray(path);
    for (size_t i = 0; i < g.size(); ++i) {
        const uint8_t v = g[i];
        if (v != kGtStatic && v != kGtShadow && v != kGtOutsideRoi &&
            v != kGtUnknown && v != kGtMoving)
            throw std::runtime_error("ground truth " + path + " contains invalid code " +
                                     std::to_string(int(v)));
    }
    return g;
}

std::pair<int, int> load_temporal_roi(const std::string& path) {
    std::ifstream in(path);
    int first = 0, last = 0;
    if (!in || !(in >> first >> last) || first < 1 || last < first)
        throw std::runtime_error("invalid temporal ROI file: " + path);
    return {first, last};
}

}  // namespace m4cd
