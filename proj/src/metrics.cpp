#include "tweetlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tweetlab {

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("confusion: prediction/label length mismatch");
    if (predictions.empty()) throw std::invalid_argument("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i] == 1)
            predictions[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            predictions[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const double total = static_cast<double>(cm.total());
    if (cm.total() <= 0) throw std::invalid_argument("metrics: zero total count");
    MetricsReport r;
    r.counts = cm;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / total;

    if (cm.tp + cm.fp > 0) {
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    } else {
        r.degenerate = true;
    }
    double tpr = 0.0, tnr = 0.0;
    if (cm.tp + cm.fn > 0) {
        tpr = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
        r.recall = tpr;
    } else {
        r.degenerate = true;
    }
    if (cm.tn + cm.fp > 0) {
        tnr = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    } else {
        r.degenerate = true;
    }
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;

    // chance agreement from the marginal products
    const double p_pos_actual = static_cast<double>(cm.tp + cm.fn) / total;
    const double p_pos_pred = static_cast<double>(cm.tp + cm.fp) / total;
    const double p_expected =
        p_pos_actual * p_pos_pred + (1.0 - p_pos_actual) * (1.0 - p_pos_pred);
    r.cohen_kappa =
        p_expected < 1.0 ? (r.accuracy - p_expected) / (1.0 - p_expected) : 0.0;

    r.auc_binary = 0.5 * (tpr + tnr);
    return r;
}

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("auc_roc: bad input lengths");
    // rank-sum formulation with midrank tie handling
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    std::int64_t n_pos = 0, n_neg = 0;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == 1) {
            pos_rank_sum += rank[t];
            ++n_pos;
        } else {
            ++n_neg;
        }
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc_roc: both classes required");
    const double np = static_cast<double>(n_pos);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

namespace {

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string report_table(const std::vector<std::pair<std::string, MetricsReport>>& reports) {
    if (reports.empty()) throw std::invalid_argument("report_table: no reports");
    struct Row {
        const char* name;
        bool lower_is_better;
        std::vector<std::string> cells;
        std::vector<double> values;
    };
    std::vector<Row> rows = {
        {"TP", false, {}, {}},       {"TN", false, {}, {}},    {"FP", true, {}, {}},
        {"FN", true, {}, {}},        {"Accuracy", false, {}, {}}, {"Precision", false, {}, {}},
        {"Recall", false, {}, {}},   {"F1", false, {}, {}},    {"CK", false, {}, {}},
        {"AUC", false, {}, {}},
    };
    for (const auto& [name, r] : reports) {
        (void)name;
        const double vals[] = {static_cast<double>(r.counts.tp), static_cast<double>(r.counts.tn),
                               static_cast<double>(r.counts.fp), static_cast<double>(r.counts.fn),
                               r.accuracy, r.precision, r.recall, r.f1, r.cohen_kappa,
                               r.auc_binary};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].values.push_back(vals[i]);
            rows[i].cells.push_back(i < 4 ? std::to_string(static_cast<std::int64_t>(vals[i]))
                                          : fmt3(vals[i]));
        }
    }
    for (auto& row : rows) {
        const double best = row.lower_is_better
                                ? *std::min_element(row.values.begin(), row.values.end())
                                : *std::max_element(row.values.begin(), row.values.end());
        for (std::size_t c = 0; c < row.cells.size(); ++c)
            if (row.values[c] == best) row.cells[c] += '*';
    }

    std::vector<std::size_t> widths;
    widths.push_back(9);
    for (const auto& [name, r] : reports) {
        (void)r;
        std::size_t w = name.size();
        for (const auto& row : rows) w = std::max(w, row.cells[widths.size() - 1].size());
        widths.push_back(w + 2);
    }
    std::ostringstream out;
    out << std::string(widths[0], ' ');
    for (std::size_t c = 0; c < reports.size(); ++c) {
        const auto& name = reports[c].first;
        out << std::string(widths[c + 1] - name.size(), ' ') << name;
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.name << std::string(widths[0] - std::string(row.name).size(), ' ');
        for (std::size_t c = 0; c < row.cells.size(); ++c)
            out << std::string(widths[c + 1] - row.cells[c].size(), ' ') << row.cells[c];
        out << '\n';
    }
    return out.str();
}

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports) {
    std::ostringstream out;
    out << "name,tp,tn,fp,fn,accuracy,precision,recall,f1,kappa,auc\n";
    for (const auto& [name, r] : reports) {
        out << name << ',' << r.counts.tp << ',' << r.counts.tn << ',' << r.counts.fp << ','
            << r.counts.fn << ',' << fmt_full(r.accuracy) << ',' << fmt_full(r.precision) << ','
            << fmt_full(r.recall) << ',' << fmt_full(r.f1) << ',' << fmt_full(r.cohen_kappa)
            << ',' << fmt_full(r.auc_binary) << '\n';
    }
    return out.str();
}

std::vector<std::pair<std::string, MetricsReport>> parse_metrics_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_metrics_csv: empty input");
    std::vector<std::pair<std::string, MetricsReport>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 11)
            throw std::runtime_error("parse_metrics_csv: expected 11 fields, got " +
                                     std::to_string(fields.size()));
        MetricsReport r;
        r.counts.tp = std::stoll(fields[1]);
        r.counts.tn = std::stoll(fields[2]);
        r.counts.fp = std::stoll(fields[3]);
        r.counts.fn = std::stoll(fields[4]);
        r.accuracy = std::stod(fields[5]);
        r.precision = std::stod(fields[6]);
        r.recall = std::stod(fields[7]);
        r.f1 = std::stod(fields[8]);
        r.cohen_kappa = std::stod(fields[9]);
        r.auc_binary = std::stod(fields[10]);
        out.emplace_back(fields[0], r);
    }
    return out;
}

}  // namespace tweetlab
