#include "medtext/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "medtext/error.hpp"

namespace medtext {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::InvalidArgument, "scores and labels differ in length");
    }
    if (scores.empty()) {
        throw Error(ErrorKind::UndefinedMetric, "metric over empty input");
    }
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw Error(ErrorKind::InvalidLabel, "labels must be 0 or 1");
        }
    }
}

std::size_t count_positives(const std::vector<int>& labels) {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

// Indices sorted by descending score.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

// Visit blocks of tied scores in descending order; fn(tp, fp) sees cumulative
// counts after each block.
template <class Fn>
void walk_threshold_blocks(const std::vector<double>& scores, const std::vector<int>& labels,
                           Fn&& fn) {
    const std::vector<std::size_t> order = descending_order(scores);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1) ++tp; else ++fp;
            ++j;
        }
        fn(tp, fp);
        i = j;
    }
}

} // namespace

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw Error(ErrorKind::UndefinedMetric, "auroc needs both classes");
    }

    // Midranks over ascending scores.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t block_pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1) ++block_pos;
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1 .. j
        rank_sum_pos += midrank * static_cast<double>(block_pos);
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double auprc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) {
        throw Error(ErrorKind::UndefinedMetric, "auprc needs at least one positive");
    }
    const double np = static_cast<double>(n_pos);
    double ap = 0.0;
    double prev_recall = 0.0;
    walk_threshold_blocks(scores, labels, [&](std::size_t tp, std::size_t fp) {
        const double recall = static_cast<double>(tp) / np;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    });
    return ap;
}

RecallAtPrecision recall_at_precision(const std::vector<double>& scores,
                                      const std::vector<int>& labels, double target) {
    check_inputs(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) {
        throw Error(ErrorKind::UndefinedMetric, "recall_at_precision needs at least one positive");
    }
    const double np = static_cast<double>(n_pos);
    RecallAtPrecision out;
    walk_threshold_blocks(scores, labels, [&](std::size_t tp, std::size_t fp) {
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (precision >= target) {
            out.defined = true;
            out.recall = std::max(out.recall, static_cast<double>(tp) / np);
        }
    });
    return out;
}

std::vector<PrPoint> pr_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) {
        throw Error(ErrorKind::UndefinedMetric, "pr_curve needs at least one positive");
    }
    const double np = static_cast<double>(n_pos);
    std::vector<PrPoint> points;
    // The curve ends once full recall is reached; lower thresholds add no
    // recall and only dilute precision.
    walk_threshold_blocks(scores, labels, [&](std::size_t tp, std::size_t fp) {
        if (!points.empty() && points.back().recall == 1.0) return;
        points.push_back({static_cast<double>(tp) / np,
                          static_cast<double>(tp) / static_cast<double>(tp + fp)});
    });
    return points;
}

MetricsReport compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels) {
    MetricsReport report;
    report.auroc = auroc(scores, labels);
    report.auprc = auprc(scores, labels);
    const RecallAtPrecision rp = recall_at_precision(scores, labels, 0.8);
    report.rp80 = rp.recall;
    report.rp80_defined = rp.defined;
    report.pr_points = pr_curve(scores, labels);
    report.n_pos = count_positives(labels);
    report.n_neg = labels.size() - report.n_pos;
    return report;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
    nlohmann::json root;
    root["auroc"] = report.auroc;
    root["auprc"] = report.auprc;
    root["rp80"] = report.rp80;
    root["rp80_defined"] = report.rp80_defined;
    root["n_pos"] = report.n_pos;
    root["n_neg"] = report.n_neg;
    return root;
}

std::string pr_curve_tsv(const std::vector<PrPoint>& points) {
    std::string out = "recall\tprecision\n";
    char line[64];
    for (const PrPoint& p : points) {
        std::snprintf(line, sizeof(line), "%.6f\t%.6f\n", p.recall, p.precision);
        out += line;
    }
    return out;
}

} // namespace medtext
