#ifndef LOWDIM_STATS_HPP
#define LOWDIM_STATS_HPP

#include "lowdim/csv.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lowdim {

enum class Metric { recall, false_alarm, auc };
enum class Direction { maximize, minimize };

/// "recall", "pf", "auc" (the table file suffixes).
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& text);
Direction direction_of(Metric metric);
inline constexpr Metric all_metrics[] = {Metric::recall, Metric::false_alarm, Metric::auc};

/// Dataset x learner grid for one metric; empty cells are undefined.
struct ResultTable {
    Metric metric = Metric::recall;
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::optional<double>> cells; ///< row-major

    ResultTable() = default;
    ResultTable(Metric metric, std::vector<std::string> rows, std::vector<std::string> columns);

    std::optional<double>& at(std::size_t r, std::size_t c) { return cells[r * columns.size() + c]; }
    const std::optional<double>& at(std::size_t r, std::size_t c) const { return cells[r * columns.size() + c]; }
    std::vector<double> defined_values() const;

    /// Shape consistency; defined cells finite and within [0, 1].
    void validate() const;
};

struct WinnerMarking {
    double threshold = 0.0;
    Direction direction = Direction::maximize;
    std::size_t n_columns = 0;
    std::vector<bool> winners; ///< row-major, aligned with ResultTable::cells

    bool winner(std::size_t r, std::size_t c) const { return winners[r * n_columns + c]; }
};

inline constexpr double default_d_fraction = 0.35;

/// Sample (n-1) standard deviation; needs at least 2 values.
double sample_sd(std::span<const double> values);

/// d x sample standard deviation of the pooled cells of one metric.
double cohens_threshold(std::span<const double> values, double d_fraction = default_d_fraction);

/// Per row, a cell wins when it lies within `threshold` of the row's best
/// defined cell (inclusive). Undefined cells never win.
WinnerMarking mark_winners(const ResultTable& table, double threshold, Direction direction);

/// Linear-interpolation quantile of already sorted values, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

struct MedianIqr {
    double median = 0.0;
    double iqr = 0.0;
};

MedianIqr median_iqr(std::span<const double> values);

/// Cells as CSV: header "dataset,<learners...>", empty field for undefined.
csv::Table table_csv(const ResultTable& table);
/// 0/1 flags aligned with table_csv.
csv::Table winners_csv(const ResultTable& table, const WinnerMarking& marking);
/// Fixed-width text grid in percent, winners in [brackets].
std::string render_text(const ResultTable& table, const WinnerMarking& marking);

} // namespace lowdim

#endif
