#include "lowdim/metrics.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace lowdim {

Confusion confusion(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size()) throw Error("confusion: labels and predictions differ in length");
    if (labels.empty()) throw Error("confusion: empty input");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] == 1;
        const bool predicted = predictions[i] == 1;
        if (actual && predicted) ++c.tp;
        else if (actual) ++c.fn;
        else if (predicted) ++c.fp;
        else ++c.tn;
    }
    return c;
}

std::optional<double> recall(const Confusion& c) {
    if (c.tp + c.fn == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> false_alarm(const Confusion& c) {
    if (c.fp + c.tn == 0) return std::nullopt;
    return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

double auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("auc: labels and scores differ in length");
    const std::size_t n = labels.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of 1-based mid-ranks of the positives, kept doubled to stay integral.
    std::size_t n_pos = 0;
    std::uint64_t doubled_rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const std::uint64_t doubled_mid_rank = (i + 1) + j; // ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                ++n_pos;
                doubled_rank_sum += doubled_mid_rank;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error("AUC undefined: need both classes");

    const double doubled_u = static_cast<double>(doubled_rank_sum) - static_cast<double>(n_pos) * (n_pos + 1);
    return doubled_u / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricsRecord evaluate(std::span<const int> labels, std::span<const int> predictions,
                       std::span<const double> scores) {
    MetricsRecord rec;
    rec.counts = confusion(labels, predictions);
    rec.recall = recall(rec.counts);
    rec.false_alarm = false_alarm(rec.counts);
    if (rec.counts.tp + rec.counts.fn > 0 && rec.counts.fp + rec.counts.tn > 0) rec.auc = auc(labels, scores);
    return rec;
}

} // namespace lowdim
