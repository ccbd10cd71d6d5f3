#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tweetlab {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const noexcept { return tp + tn + fp + fn; }
};

struct MetricsReport {
    ConfusionMatrix counts;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double cohen_kappa = 0.0;
    // balanced accuracy (TPR+TNR)/2 computed from hard predictions; on a
    // class-balanced test set this coincides with accuracy
    double auc_binary = 0.0;
    // set when a zero denominator forced precision/recall to 0
    bool degenerate = false;
};

// positive class = 1; throws on length mismatch or empty input
ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

// throws std::invalid_argument on zero total
MetricsReport metrics(const ConfusionMatrix& cm);

// threshold-sweep ROC AUC over scores; separate from the hard-prediction
// auc_binary above and never compared against printed table values
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

// Side-by-side table: TP/TN/FP/FN rows then the six metrics at three
// decimals, best value per row marked with '*'.
std::string report_table(const std::vector<std::pair<std::string, MetricsReport>>& reports);

// header: name,tp,tn,fp,fn,accuracy,precision,recall,f1,kappa,auc
std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports);
std::vector<std::pair<std::string, MetricsReport>> parse_metrics_csv(const std::string& csv);

}  // namespace tweetlab
