#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "m4cd/image.hpp"

namespace m4cd {

struct Confusion {
    uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    uint64_t fp_shadow = 0;    // false positives on hard-shadow GT pixels
    uint64_t shadow_total = 0; // hard-shadow GT pixels seen

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        fp_shadow += o.fp_shadow;
        shadow_total += o.shadow_total;
        return *this;
    }
};

// Pixels with GT codes 85 (outside ROI) and 170 (unknown) are excluded.
void accumulate(const LabelMask& mask, const GroundTruthMask& gt, Confusion& conf);

struct MetricsReport {
    double recall = 0, specificity = 0, fpr = 0, fnr = 0, pwc = 0;
    double fmeasure = 0, precision = 0, fpr_s = 0;
    bool zero_denominator = false;  // some metric had an empty denominator
};

MetricsReport report(const Confusion& conf);

// unweighted mean of per-video (or per-category) reports
MetricsReport aggregate(const std::vector<MetricsReport>& reports);

struct NamedReport {
    std::string name;
    MetricsReport metrics;
};

std::string format_table(const std::vector<NamedReport>& rows);
std::string format_csv(const std::vector<NamedReport>& rows);

}  // namespace m4cd
