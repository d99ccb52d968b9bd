#ifndef LOWDIM_METRICS_HPP
#define LOWDIM_METRICS_HPP

#include <cstddef>
#include <optional>
#include <span>

namespace lowdim {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Counts with class 1 as positive. Throws on length mismatch or empty input.
Confusion confusion(std::span<const int> labels, std::span<const int> predictions);

/// tp / (tp + fn); nullopt when there are no positives.
std::optional<double> recall(const Confusion& c);
/// fp / (fp + tn); nullopt when there are no negatives.
std::optional<double> false_alarm(const Confusion& c);

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann-Whitney U / (n_pos n_neg)). Throws when only one
/// class is present.
double auc(std::span<const int> labels, std::span<const double> scores);

struct MetricsRecord {
    Confusion counts;
    std::optional<double> recall;
    std::optional<double> false_alarm;
    std::optional<double> auc;
};

/// All three measures for one evaluation cell; undefined measures stay empty.
MetricsRecord evaluate(std::span<const int> labels, std::span<const int> predictions,
                       std::span<const double> scores);

} // namespace lowdim

#endif
