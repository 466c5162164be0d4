#include "m4cd/evaluation.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace m4cd {

void accumulate(const LabelMask& mask, const GroundTruthMask& gt, Confusion& conf) {
    if (!mask.same_size(gt))
        throw std::runtime_error("accumulate: mask and ground truth dimensions differ");
    for (size_t i = 0; i < mask.size(); ++i) {
        const uint8_t code = gt[i];
        if (code == kGtOutsideRoi || code == kGtUnknown) continue;
        const bool detected = mask[i] != 0;
        if (code == kGtMoving) {
            detected ? ++conf.tp : ++conf.fn;
        } else {  // static background or hard shadow count as negatives
            if (code == kGtShadow) {
                ++conf.shadow_total;
                if (detected) ++conf.fp_shadow;
            }
            detected ? ++conf.fp : ++conf.tn;
        }
    }
}

namespace {
double ratio(uint64_t num, uint64_t den, bool& flag) {
    if (den == 0) {
        flag = true;
        return 0.0;
    }
    return double(num) / double(den);
}
}  // namespace

MetricsReport report(const Confusion& c) {
    MetricsReport r;
    r.recall = ratio(c.tp, c.tp + c.fn, r.zero_denominator);
    r.specificity = ratio(c.tn, c.tn + c.fp, r.zero_denominator);
    r.fpr = (c.tn + c.fp) ? 1.0 - r.specificity : 0.0;
    r.fnr = (c.tp + c.fn) ? 1.0 - r.recall : 0.0;
    const uint64_t total = c.tp + c.fn + c.fp + c.tn;
    r.pwc = total ? 100.0 * double(c.fn + c.fp) / double(total) : (r.zero_denominator = true, 0.0);
    r.precision = ratio(c.tp, c.tp + c.fp, r.zero_denominator);
    r.fmeasure = (r.precision + r.recall > 0.0)
                     ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                     : (r.zero_denominator = true, 0.0);
    // no shadow annotations at all is normal, not a degenerate case
    r.fpr_s = c.shadow_total ? double(c.fp_shadow) / double(c.shadow_total) : 0.0;
    return r;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports) {
    MetricsReport out;
    if (reports.empty()) {
        out.zero_denominator = true;
        return out;
    }
    for (const MetricsReport& r : reports) {
        out.recall += r.recall;
        out.specificity += r.specificity;
        out.fpr += r.fpr;
        out.fnr += r.fnr;
        out.pwc += r.pwc;
        out.fmeasure += r.fmeasure;
        out.precision += r.precision;
        out.fpr_s += r.fpr_s;
        out.zero_denominator = out.zero_denominator || r.zero_denominator;
    }
    const double n = double(reports.size());
    out.recall /= n;
    out.specificity /= n;
    out.fpr /= n;
    out.fnr /= n;
    out.pwc /= n;
    out.fmeasure /= n;
    out.precision /= n;
    out.fpr_s /= n;
    return out;
}

namespace {
constexpr const char* kColumns[] = {"Recall", "Specificity", "FPR", "FNR",
                                    "PWC", "F-Measure", "Precision", "FPR-S"};

std::vector<double> values_of(const MetricsReport& m) {
    return {m.recall, m.specificity, m.fpr, m.fnr, m.pwc, m.fmeasure, m.precision, m.fpr_s};
}
}  // namespace

std::string format_table(const std::vector<NamedReport>& rows) {
    size_t name_width = 4;
    for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
    std::ostringstream out;
    out << std::left << std::setw(int(name_width) + 2) << "Name";
    for (const char* col : kColumns) out << std::right << std::setw(12) << col;
    out << "\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(int(name_width) + 2) << row.name;
        for (double v : values_of(row.metrics))
            out << std::right << std::setw(12) << std::fixed << std::setprecision(4) << v;
        if (row.metrics.zero_denominator) out << "  (zero-denominator)";
        out << "\n";
    }
    return out.str();
}

std::string format_csv(const std::vector<NamedReport>& rows) {
    std::ostringstream out;
    out << "Name";
    for (const char* col : kColumns) out << "," << col;
    out << "\n";
    for (const auto& row : rows) {
        out << row.name;
        for (double v : values_of(row.metrics))
            out << "," << std::fixed << std::setprecision(6) << v;
        out << "\n";
    }
    return out.str();
}

}  // namespace m4cd
