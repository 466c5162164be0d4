#include "m4cd/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace m4cd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Field {
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    T out;
    std::string rest;
    if (!(in >> out) || (in >> rest))
        throw std::runtime_error("config: invalid value for '" + key + "': " + v);
    return out;
}

template <>
bool parse_num<bool>(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config: invalid value for '" + key + "': " + v);
}

template <typename T>
std::string to_str(T v) {
    std::ostringstream out;
    if constexpr (std::is_same_v<T, bool>)
        out << (v ? "true" : "false");
    else
        out << v;
    return out.str();
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> m = [] {
        std::map<std::string, Field> f;
        auto add = [&f](const std::string& key, auto member) {
            using T = std::remove_reference_t<decltype(std::declval<PipelineConfig>().*member)>;
            f[key] = Field{
                [key, member](PipelineConfig& c, const std::string& v) { c.*member = parse_num<T>(key, v); },
                [member](const PipelineConfig& c) { return to_str(c.*member); }};
        };
        add("num_samples", &PipelineConfig::num_samples);
        add("num_close", &PipelineConfig::num_close);
        add("ltp_tau", &PipelineConfig::ltp_tau);
        add("ltp_nu", &PipelineConfig::ltp_nu);
        add("subsample_initial_frames", &PipelineConfig::subsample_initial_frames);
        add("subsample_factor", &PipelineConfig::subsample_factor);
        add("reinit_disp1", &PipelineConfig::reinit_disp1);
        add("reinit_disp2", &PipelineConfig::reinit_disp2);
        add("reinit_disp3", &PipelineConfig::reinit_disp3);
        add("reinit_downscale", &PipelineConfig::reinit_downscale);
        add("reinit_ring_capacity", &PipelineConfig::reinit_ring_capacity);
        add("reinit_sample_stride", &PipelineConfig::reinit_sample_stride);
        add("reinit_check_stride", &PipelineConfig::reinit_check_stride);
        add("reinit_cooldown", &PipelineConfig::reinit_cooldown);
        add("reinit_sig_threshold", &PipelineConfig::reinit_sig_threshold);
        add("reinit_entropy_grid", &PipelineConfig::reinit_entropy_grid);
        add("match_bv", &PipelineConfig::match_bv);
        add("match_cv", &PipelineConfig::match_cv);
        add("match_tv", &PipelineConfig::match_tv);
        add("tau_bv", &PipelineConfig::tau_bv);
        add("tau_cv", &PipelineConfig::tau_cv);
        add("tau_tv", &PipelineConfig::tau_tv);
        add("kde_bandwidth", &PipelineConfig::kde_bandwidth);
        add("kde_min_total", &PipelineConfig::kde_min_total);
        add("kde_forget", &PipelineConfig::kde_forget);
        add("prior_rho", &PipelineConfig::prior_rho);
        add("prior_init", &PipelineConfig::prior_init);
        add("prior_min", &PipelineConfig::prior_min);
        add("prior_max", &PipelineConfig::prior_max);
        add("mrf_phi", &PipelineConfig::mrf_phi);
        add("mrf_sigma", &PipelineConfig::mrf_sigma);
        add("mrf_xi", &PipelineConfig::mrf_xi);
        add("mrf_psi", &PipelineConfig::mrf_psi);
        add("bp_tol", &PipelineConfig::bp_tol);
        add("bp_max_iters", &PipelineConfig::bp_max_iters);
        add("bp_damping", &PipelineConfig::bp_damping);
        add("slic_region_size", &PipelineConfig::slic_region_size);
        add("slic_compactness", &PipelineConfig::slic_compactness);
        add("slic_iters", &PipelineConfig::slic_iters);
        add("area_small", &PipelineConfig::area_small);
        add("area_large", &PipelineConfig::area_large);
        add("area_pixel_threshold", &PipelineConfig::area_pixel_threshold);
        add("warmup_frames", &PipelineConfig::warmup_frames);
        add("seed", &PipelineConfig::seed);
        add("force_scalar_kernels", &PipelineConfig::force_scalar_kernels);
        return f;
    }();
    return m;
}

void check(bool ok, const char* what) {
    if (!ok) throw std::runtime_error(std::string("config: invalid value for '") + what + "'");
}

}  // namespace

void PipelineConfig::validate() const {
    check(num_samples >= 3, "num_samples");
    check(num_close >= 1 && num_close <= num_samples, "num_close");
    check(ltp_tau >= 0.0 && ltp_tau < 1.0, "ltp_tau");
    check(ltp_nu >= 0, "ltp_nu");
    check(subsample_initial_frames >= 0, "subsample_initial_frames");
    check(subsample_factor >= 1, "subsample_factor");
    check(reinit_downscale >= 1, "reinit_downscale");
    check(reinit_ring_capacity >= 2, "reinit_ring_capacity");
    check(reinit_sample_stride >= 1, "reinit_sample_stride");
    check(reinit_check_stride >= 1, "reinit_check_stride");
    check(reinit_cooldown >= 0, "reinit_cooldown");
    check(reinit_sig_threshold > 0.0, "reinit_sig_threshold");
    check(reinit_entropy_grid >= 1, "reinit_entropy_grid");
    check(match_bv > 0.0, "match_bv");
    check(match_cv > 0.0, "match_cv");
    check(match_tv > 0, "match_tv");
    check(tau_bv > 0.0, "tau_bv");
    check(tau_cv > 0.0, "tau_cv");
    check(tau_tv > 0, "tau_tv");
    check(kde_bandwidth > 0.0, "kde_bandwidth");
    check(kde_min_total >= 1, "kde_min_total");
    check(kde_forget >= 0.0 && kde_forget < 1.0, "kde_forget");
    check(prior_rho > 0.0 && prior_rho < 1.0, "prior_rho");
    check(prior_min > 0.0 && prior_min < prior_max && prior_max < 1.0, "prior_min");
    check(prior_init >= prior_min && prior_init <= prior_max, "prior_init");
    check(mrf_phi >= 0.0, "mrf_phi");
    check(mrf_sigma > 0.0, "mrf_sigma");
    check(mrf_xi >= 0.0, "mrf_xi");
    check(mrf_psi >= 0.0, "mrf_psi");
    check(bp_tol > 0.0, "bp_tol");
    check(bp_max_iters >= 1, "bp_max_iters");
    check(bp_damping >= 0.0 && bp_damping < 1.0, "bp_damping");
    check(slic_region_size >= 4, "slic_region_size");
    check(slic_compactness > 0.0, "slic_compactness");
    check(slic_iters >= 1, "slic_iters");
    check(area_small >= 0, "area_small");
    check(area_large >= 0, "area_large");
    check(area_pixel_threshold > 0, "area_pixel_threshold");
    check(warmup_frames >= 0, "warmup_frames");
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end())
            throw std::runtime_error("config: unknown key '" + key + "'");
        it->second.set(cfg, val);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    for (const auto& [key, field] : fields())
        out << key << " = " << field.get(cfg) << "\n";
}

}  // namespace m4cd
