#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "m4cd/evaluation.hpp"
#include "m4cd/pipeline.hpp"
#include "m4cd/video_io.hpp"

namespace fs = std::filesystem;
using namespace m4cd;

namespace {

std::string mask_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "bin%06d.png", index);
    return buf;
}

void run_detect(const std::string& input, const std::string& output,
                const std::string& config_path, uint64_t seed, bool seed_set,
                const std::string& diagnostics_path, const std::string& checkpoint_path) {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed_set) cfg.seed = seed;
    cfg.validate();

    FrameSequence seq(input);
    fs::create_directories(output);

    std::ofstream diag_out;
    if (!diagnostics_path.empty()) {
        diag_out.open(diagnostics_path);
        if (!diag_out) throw std::runtime_error("cannot write diagnostics: " + diagnostics_path);
    }

    const int median_span = std::min(seq.count(), 100);
    std::vector<Frame> buffered;
    buffered.reserve(size_t(median_span));
    for (int i = 1; i <= median_span; ++i) buffered.push_back(seq.load(i));
    std::vector<const Frame*> median_frames;
    for (const Frame& f : buffered) median_frames.push_back(&f);

    Pipeline pipeline(seq.width(), seq.height(), cfg);
    pipeline.initialize(buffered.front(), median_frames);

    for (int i = 1; i <= seq.count(); ++i) {
        const Frame frame = i <= median_span ? std::move(buffered[size_t(i - 1)]) : seq.load(i);
        const LabelMask mask = pipeline.process_frame(frame);
        write_mask(mask, (fs::path(output) / mask_name(i)).string());
        if (diag_out) {
            const FrameDiagnostics& d = pipeline.last_diagnostics();
            diag_out << "frame=" << d.frame_index << " warmup=" << int(d.warmup)
                     << " t_features_ms=" << d.t_features << " t_learning_ms=" << d.t_learning
                     << " t_labeling_ms=" << d.t_labeling << " t_update_ms=" << d.t_update
                     << " bp_iters=" << d.bp_iterations << " bp_delta=" << d.bp_final_delta
                     << " bp_energy=" << d.bp_energy << " reinit=" << int(d.reinit_triggered)
                     << " disp1=" << d.disparities.disp1 << " disp2=" << d.disparities.disp2
                     << " disp3=" << d.disparities.disp3 << "\n";
        }
    }
    if (!checkpoint_path.empty()) pipeline.dump_checkpoint(checkpoint_path);
}

std::vector<std::string> sorted_images(const fs::path& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp"))
            out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Confusion eval_video(const std::string& masks_dir, const std::string& gt_dir,
                     int roi_first, int roi_last) {
    const auto masks = sorted_images(masks_dir);
    const auto gts = sorted_images(gt_dir);
    if (masks.size() != gts.size())
        throw std::runtime_error("mask/ground-truth count mismatch: " + std::to_string(masks.size()) +
                                 " masks in " + masks_dir + " vs " + std::to_string(gts.size()) +
                                 " ground-truth frames in " + gt_dir);
    Confusion conf;
    for (int i = roi_first; i <= roi_last && i <= int(masks.size()); ++i) {
        const LabelMask mask = load_mask(masks[size_t(i - 1)]);
        const GroundTruthMask gt = load_groundtruth(gts[size_t(i - 1)]);
        accumulate(mask, gt, conf);
    }
    return conf;
}

void write_reports(const std::vector<NamedReport>& rows, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream txt(fs::path(out_dir) / "metrics.txt");
    txt << format_table(rows);
    std::ofstream csv(fs::path(out_dir) / "metrics.csv");
    csv << format_csv(rows);
    std::cout << format_table(rows);
}

void run_eval(const std::string& masks_dir, const std::string& gt_dir,
              const std::string& roi_path, const std::string& out_dir) {
    int first = 1, last = 1 << 30;
    if (!roi_path.empty()) std::tie(first, last) = load_temporal_roi(roi_path);
    const Confusion conf = eval_video(masks_dir, gt_dir, first, last);
    write_reports({{fs::path(masks_dir).filename().string(), report(conf)}},
                  out_dir.empty() ? masks_dir : out_dir);
}

void run_cdnet(const std::string& root, const std::string& output,
               const std::string& config_path, uint64_t seed, bool seed_set) {
    std::vector<NamedReport> rows;
    std::vector<MetricsReport> category_reports;
    std::vector<fs::path> categories;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) categories.push_back(e.path());
    std::sort(categories.begin(), categories.end());
    if (categories.empty()) throw std::runtime_error("no categories under " + root);

    for (const fs::path& category : categories) {
        std::vector<fs::path> videos;
        for (const auto& e : fs::directory_iterator(category))
            if (e.is_directory() && fs::is_directory(e.path() / "input")) videos.push_back(e.path());
        std::sort(videos.begin(), videos.end());
        if (videos.empty()) continue;

        std::vector<MetricsReport> video_reports;
        for (const fs::path& video : videos) {
            const std::string name = category.filename().string() + "/" + video.filename().string();
            std::cout << "processing " << name << "...\n";
            const std::string masks_dir = (fs::path(output) / category.filename() / video.filename()).string();
            run_detect((video / "input").string(), masks_dir, config_path, seed, seed_set, "", "");
            const auto [first, last] = load_temporal_roi((video / "temporalROI.txt").string());
            const Confusion conf = eval_video(masks_dir, (video / "groundtruth").string(), first, last);
            video_reports.push_back(report(conf));
            rows.push_back({name, video_reports.back()});
        }
        category_reports.push_back(aggregate(video_reports));
        rows.push_back({category.filename().string() + " (category)", category_reports.back()});
    }
    rows.push_back({"Overall", aggregate(category_reports)});
    write_reports(rows, output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"M4CD change detection"};
    app.require_subcommand(1);

    std::string input, output, gt, config_path, roi_path, out_dir, diagnostics, checkpoint, root;
    uint64_t seed = 0;
    bool deterministic = false;

    auto* detect = app.add_subcommand("detect", "run change detection over a frame directory");
    detect->add_option("--input", input, "input frame directory")->required();
    detect->add_option("--output", output, "output mask directory")->required();
    detect->add_option("--config", config_path, "pipeline config file");
    auto* seed_opt = detect->add_option("--seed", seed, "RNG seed");
    detect->add_flag("--deterministic", deterministic, "force sequential processing (always on)");
    detect->add_option("--dump-diagnostics", diagnostics, "per-frame diagnostics file");
    detect->add_option("--checkpoint", checkpoint, "write histogram/prior checkpoint here");

    auto* eval = app.add_subcommand("eval", "score masks against ground truth");
    eval->add_option("--input", input, "mask directory")->required();
    eval->add_option("--gt", gt, "ground-truth directory")->required();
    eval->add_option("--roi", roi_path, "temporalROI.txt path");
    eval->add_option("--output", out_dir, "report directory (default: mask directory)");

    auto* cdnet = app.add_subcommand("run-cdnet", "process a CDnet-layout dataset tree");
    cdnet->add_option("--root", root, "dataset root (category/video/input)")->required();
    cdnet->add_option("--output", output, "output directory")->required();
    cdnet->add_option("--config", config_path, "pipeline config file");
    auto* cdnet_seed = cdnet->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed())
            run_detect(input, output, config_path, seed, seed_opt->count() > 0, diagnostics, checkpoint);
        else if (eval->parsed())
            run_eval(input, gt, roi_path, out_dir);
        else
            run_cdnet(root, output, config_path, seed, cdnet_seed->count() > 0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
