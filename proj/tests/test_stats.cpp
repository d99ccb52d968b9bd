#include "support.hpp"

#include "lowdim/error.hpp"
#include "lowdim/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace lowdim;

namespace {

const std::vector<std::string> learners{"dnn_weighted", "cnn", "dnn", "random_forest", "decision_tree",
                                        "linear_svm"};

ResultTable one_row(Metric metric, std::vector<double> percent) {
    ResultTable t(metric, {"derby"}, std::vector<std::string>(learners.begin(), learners.begin() + percent.size()));
    for (std::size_t c = 0; c < percent.size(); ++c) t.at(0, c) = percent[c] / 100.0;
    return t;
}

std::vector<bool> row_flags(const WinnerMarking& m) { return m.winners; }

ResultTable random_table(Rng& rng) {
    const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 6;
    ResultTable t(Metric::auc, std::vector<std::string>(rows, "d"), std::vector<std::string>(cols, "l"));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& cell : t.cells) {
        if (rng() % 10 == 0) continue;
        cell = std::round(u(rng) * 16.0) / 20.0;
    }
    return t;
}

// Sort-based quantile with linear interpolation between closest ranks.
double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

TEST_CASE("cohens threshold examples") {
    const double gap = 0.0857 * std::sqrt(2.0);
    std::vector<double> two{0.9, 0.9 + gap};
    CHECK(sample_sd(two) == doctest::Approx(0.0857));
    CHECK(cohens_threshold(two) == doctest::Approx(0.030).epsilon(0.001));

    std::vector<double> constant{0.4, 0.4, 0.4};
    CHECK(cohens_threshold(constant) == 0.0);

    std::vector<double> unit{0.0, 1.0};
    CHECK(cohens_threshold(unit) == doctest::Approx(0.35 * std::sqrt(0.5)));
    CHECK(cohens_threshold(unit) == doctest::Approx(0.2475).epsilon(1e-3));
}

TEST_CASE("reference recall block gives a 3% threshold") {
    const std::vector<double> percent{96.6, 96.9, 94.0, 92.0, 94.8, 97.8, 97.6, 95.0, 92.0, 78.9, 94.7, 97.0,
                                      95.3, 98.1, 91.3, 96.8, 96.6, 87.1, 95.2, 93.0, 89.3, 88.7, 86.8, 96.1,
                                      81.3, 98.8, 68.1, 76.8, 75.7, 90.3, 94.3, 93.9, 89.2, 96.9, 92.7, 93.3,
                                      98.0, 95.0, 96.4, 91.8, 87.6, 98.2, 91.1, 93.1, 84.1, 78.7, 87.0, 95.0,
                                      81.1, 97.8, 73.3, 66.7, 92.0, 99.5};
    std::vector<double> cells;
    for (double p : percent) cells.push_back(p / 100.0);
    CHECK(std::round(cohens_threshold(cells) * 100.0) == 3.0);
}

TEST_CASE("derby rows reproduce the gray cells") {
    auto recall_row = one_row(Metric::recall, {96.6, 96.9, 94.0, 92.0, 94.8, 97.8});
    auto r = mark_winners(recall_row, 0.03, Direction::maximize);
    CHECK(row_flags(r) == std::vector<bool>{true, true, false, false, true, true});

    auto pf_row = one_row(Metric::false_alarm, {1.2, 10.8, 0.5, 0.3, 0.5, 1.3});
    auto p = mark_winners(pf_row, 0.02, Direction::minimize);
    CHECK(row_flags(p) == std::vector<bool>{true, false, true, true, true, true});
}

TEST_CASE("winner marking edge cases") {
    auto single = one_row(Metric::auc, {42.0});
    CHECK(mark_winners(single, 0.0, Direction::maximize).winner(0, 0));

    ResultTable gaps(Metric::auc, {"a"}, {"x", "y", "z"});
    gaps.at(0, 1) = 0.7;
    auto m = mark_winners(gaps, 1.0, Direction::maximize);
    CHECK(row_flags(m) == std::vector<bool>{false, true, false});

    ResultTable empty(Metric::auc, {}, {});
    CHECK_THROWS_AS(mark_winners(empty, 0.1, Direction::maximize), Error);
}

TEST_CASE("median and IQR examples") {
    std::vector<double> five{1, 2, 3, 4, 5};
    CHECK(median_iqr(five).median == 3.0);
    CHECK(median_iqr(five).iqr == 2.0);
    std::vector<double> seven{7};
    CHECK(median_iqr(seven).median == 7.0);
    CHECK(median_iqr(seven).iqr == 0.0);
    std::vector<double> medians{0.952, 0.951, 0.893, 0.887, 0.920, 0.961};
    CHECK(median_iqr(medians).median == doctest::Approx(0.9355));
    CHECK(median_iqr(medians).iqr == doctest::Approx(0.95175 - 0.89975));
    CHECK_THROWS_AS(median_iqr(std::vector<double>{}), Error);
}

TEST_CASE("property: median_iqr matches a sort-based oracle and ignores order") {
    Rng rng(77);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> v(1 + rng() % 8);
        for (auto& x : v) x = u(rng);
        const auto got = median_iqr(v);
        CHECK(got.median == doctest::Approx(oracle_quantile(v, 0.5)).epsilon(1e-14));
        CHECK(got.iqr == doctest::Approx(oracle_quantile(v, 0.75) - oracle_quantile(v, 0.25)).epsilon(1e-14));
        std::shuffle(v.begin(), v.end(), rng);
        const auto again = median_iqr(v);
        CHECK(again.median == got.median);
        CHECK(again.iqr == got.iqr);
    }
}

TEST_CASE("property: shifting a row leaves its winners alone") {
    Rng rng(78);
    for (int trial = 0; trial < 500; ++trial) {
        ResultTable t = random_table(rng);
        const double threshold = static_cast<double>(rng() % 5) / 20.0;
        const auto direction = rng() % 2 ? Direction::maximize : Direction::minimize;
        const auto before = mark_winners(t, threshold, direction);
        const double shift = static_cast<double>(rng() % 8) / 64.0;
        ResultTable moved = t;
        const std::size_t row = rng() % t.rows.size();
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (moved.at(row, c)) *moved.at(row, c) += shift;
        CHECK(mark_winners(moved, threshold, direction).winners == before.winners);
    }
}

TEST_CASE("property: larger thresholds never remove winners") {
    Rng rng(79);
    for (int trial = 0; trial < 500; ++trial) {
        ResultTable t = random_table(rng);
        const auto direction = rng() % 2 ? Direction::maximize : Direction::minimize;
        const double lo = static_cast<double>(rng() % 10) / 40.0;
        const double hi = lo + static_cast<double>(rng() % 10) / 40.0;
        const auto a = mark_winners(t, lo, direction);
        const auto b = mark_winners(t, hi, direction);
        for (std::size_t i = 0; i < a.winners.size(); ++i)
            if (a.winners[i]) CHECK(b.winners[i]);
    }
}

TEST_CASE("property: threshold 0 picks exactly the row-best cells") {
    Rng rng(80);
    for (int trial = 0; trial < 500; ++trial) {
        ResultTable t = random_table(rng);
        const auto m = mark_winners(t, 0.0, Direction::maximize);
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            std::optional<double> best;
            for (std::size_t c = 0; c < t.columns.size(); ++c)
                if (t.at(r, c) && (!best || *t.at(r, c) > *best)) best = t.at(r, c);
            for (std::size_t c = 0; c < t.columns.size(); ++c)
                CHECK(m.winner(r, c) == (t.at(r, c).has_value() && *t.at(r, c) == *best));
        }
    }
}

TEST_CASE("table exports") {
    auto t = one_row(Metric::recall, {96.6, 96.9, 94.0});
    t.at(0, 2).reset();
    auto m = mark_winners(t, 0.001, Direction::maximize);
    auto cells = table_csv(t);
    CHECK(cells.header == std::vector<std::string>{"dataset", "dnn_weighted", "cnn", "dnn"});
    CHECK(cells.rows[0][0] == "derby");
    CHECK(cells.rows[0][3].empty());
    auto flags = winners_csv(t, m);
    CHECK(flags.rows[0] == std::vector<std::string>{"derby", "0", "1", "0"});
    const auto text = render_text(t, m);
    CHECK(text.find("[96.9%]") != std::string::npos);
    CHECK(text.find("[96.6%]") == std::string::npos);
}
