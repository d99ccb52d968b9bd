#include "lowdim/stats.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace lowdim {

namespace {

// Cells are decimals such as 0.948; keep "exactly d away" inclusive under binary rounding.
constexpr double boundary_tolerance = 1e-9;

} // namespace

std::string to_string(Metric metric) {
    switch (metric) {
    case Metric::recall: return "recall";
    case Metric::false_alarm: return "pf";
    case Metric::auc: return "auc";
    }
    return "unknown";
}

Metric metric_from_string(const std::string& text) {
    if (text == "recall") return Metric::recall;
    if (text == "pf" || text == "false_alarm") return Metric::false_alarm;
    if (text == "auc") return Metric::auc;
    throw Error("unknown metric '" + text + "' (expected recall, pf or auc)");
}

Direction direction_of(Metric metric) {
    return metric == Metric::false_alarm ? Direction::minimize : Direction::maximize;
}

ResultTable::ResultTable(Metric metric_, std::vector<std::string> rows_, std::vector<std::string> columns_)
    : metric(metric_), rows(std::move(rows_)), columns(std::move(columns_)), cells(rows.size() * columns.size()) {}

std::vector<double> ResultTable::defined_values() const {
    std::vector<double> out;
    for (const auto& cell : cells) {
        if (cell) out.push_back(*cell);
    }
    return out;
}

void ResultTable::validate() const {
    if (cells.size() != rows.size() * columns.size()) throw Error("result table shape mismatch");
    for (const auto& cell : cells) {
        if (cell && !(std::isfinite(*cell) && *cell >= 0.0 && *cell <= 1.0)) {
            throw Error("result table cell outside [0, 1]");
        }
    }
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) throw Error("standard deviation needs at least 2 values");
    if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double cohens_threshold(std::span<const double> values, double d_fraction) {
    if (values.size() < 2) throw Error("Cohen's threshold needs at least 2 values");
    if (!(d_fraction >= 0.0)) throw Error("d fraction must be non-negative");
    return d_fraction * sample_sd(values);
}

WinnerMarking mark_winners(const ResultTable& table, double threshold, Direction direction) {
    table.validate();
    if (table.rows.empty() || table.columns.empty()) throw Error("cannot mark winners of an empty table");
    if (!(threshold >= 0.0)) throw Error("winner threshold must be non-negative");

    WinnerMarking marking{threshold, direction, table.columns.size(), std::vector<bool>(table.cells.size(), false)};
    const bool maximize = direction == Direction::maximize;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::optional<double> best;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const auto& cell = table.at(r, c);
            if (cell && (!best || (maximize ? *cell > *best : *cell < *best))) best = *cell;
        }
        if (!best) continue;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const auto& cell = table.at(r, c);
            if (!cell) continue;
            const double gap = maximize ? *best - *cell : *cell - *best;
            marking.winners[r * table.columns.size() + c] = gap <= threshold + boundary_tolerance;
        }
    }
    return marking;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

MedianIqr median_iqr(std::span<const double> values) {
    if (values.empty()) throw Error("median of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return {quantile_sorted(sorted, 0.5), quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)};
}

csv::Table table_csv(const ResultTable& table) {
    csv::Table out;
    out.header.push_back("dataset");
    out.header.insert(out.header.end(), table.columns.begin(), table.columns.end());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<std::string> rec{table.rows[r]};
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const auto& cell = table.at(r, c);
            rec.push_back(cell ? csv::format_double(*cell) : "");
        }
        out.rows.push_back(std::move(rec));
    }
    return out;
}

csv::Table winners_csv(const ResultTable& table, const WinnerMarking& marking) {
    csv::Table out;
    out.header.push_back("dataset");
    out.header.insert(out.header.end(), table.columns.begin(), table.columns.end());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<std::string> rec{table.rows[r]};
        for (std::size_t c = 0; c < table.columns.size(); ++c) rec.push_back(marking.winner(r, c) ? "1" : "0");
        out.rows.push_back(std::move(rec));
    }
    return out;
}

std::string render_text(const ResultTable& table, const WinnerMarking& marking) {
    std::size_t first_width = 7;
    for (const auto& row : table.rows) first_width = std::max(first_width, row.size());
    std::vector<std::size_t> widths;
    for (const auto& col : table.columns) widths.push_back(std::max<std::size_t>(9, col.size()));

    auto pad = [](std::string s, std::size_t width, bool left) {
        if (s.size() < width) s = left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
        return s;
    };

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", marking.threshold * 100.0);
    std::string out = to_string(table.metric) + " (" +
                      (marking.direction == Direction::maximize ? "maximize" : "minimize") +
                      ", d = " + buf + "%; winners in [brackets])\n";
    out += pad("dataset", first_width, true);
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += "  " + pad(table.columns[c], widths[c], false);
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += pad(table.rows[r], first_width, true);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            std::string text = "n/a";
            if (const auto& cell = table.at(r, c)) {
                std::snprintf(buf, sizeof(buf), "%.1f%%", *cell * 100.0);
                text = marking.winner(r, c) ? "[" + std::string(buf) + "]" : std::string(buf) + " ";
            }
            out += "  " + pad(text, widths[c], false);
        }
        out += '\n';
    }
    return out;
}

} // namespace lowdim
