#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace medtext {

// Probability that a random positive outranks a random negative, ties
// counted half (Mann-Whitney). Requires at least one of each class.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Average precision: sum over descending-score thresholds of precision times
// recall increment, ties processed as one block. Requires >= 1 positive.
double auprc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RecallAtPrecision {
    double recall = 0.0;
    bool defined = false;
};

// Maximum recall over thresholds whose precision reaches the target; when no
// threshold qualifies, recall 0 with defined = false.
RecallAtPrecision recall_at_precision(const std::vector<double>& scores,
                                      const std::vector<int>& labels, double target = 0.8);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

// One point per distinct threshold, descending score; recall non-decreasing.
std::vector<PrPoint> pr_curve(const std::vector<double>& scores, const std::vector<int>& labels);

struct MetricsReport {
    double auroc = 0.0;
    double auprc = 0.0;
    double rp80 = 0.0;
    bool rp80_defined = false;
    std::vector<PrPoint> pr_points;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

MetricsReport compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels);

nlohmann::json metrics_to_json(const MetricsReport& report);
std::string pr_curve_tsv(const std::vector<PrPoint>& points);

} // namespace medtext
