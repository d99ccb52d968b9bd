#ifndef LOWDIM_RIG_HPP
#define LOWDIM_RIG_HPP

#include "lowdim/dataset.hpp"
#include "lowdim/learners.hpp"
#include "lowdim/metrics.hpp"
#include "lowdim/stats.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lowdim {

struct LearnerSpec {
    std::string name;
    LearnerKind kind = LearnerKind::decision_tree;
    TrainConfig config;
};

/// Named learner presets: tree, forest, svm, dnn (alias mlp) and
/// dnn_weighted (alias mlp_weighted, class-reweighted loss).
LearnerSpec learner_spec(const std::string& name);
/// The comparison set, in table column order.
std::vector<LearnerSpec> default_learners();

struct DatasetPair {
    std::string name;
    Dataset train;
    Dataset test;
};

struct ExperimentPlan {
    std::vector<DatasetPair> datasets;
    std::vector<LearnerSpec> learners;
    std::size_t n_repeats = 10;
    std::size_t n_bins = 5;
    std::uint64_t base_seed = 0;
    /// Worker threads over (dataset, learner, repeat) cells; results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

struct RunRecord {
    std::string dataset;
    std::string learner;
    std::size_t repeat = 0;
    std::size_t bin = 0;
    MetricsRecord metrics;
    double wall_time_seconds = 0.0; ///< time of the fit that produced this record
};

struct FitFailure {
    std::string dataset;
    std::string learner;
    std::size_t repeat = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<FitFailure> failures;
};

/// For every repeat: shuffle train and test (seed base_seed + repeat), split
/// the test set into stratified bins, fit each learner once on the whole
/// training set and evaluate it on every bin. Records come out ordered by
/// dataset, learner, repeat, bin. A failing fit is logged and skipped.
ExperimentResult run_experiment(const ExperimentPlan& plan);

std::optional<double> metric_value(const MetricsRecord& metrics, Metric metric);

struct LearnerSummary {
    std::string learner;
    Metric metric = Metric::recall;
    std::optional<MedianIqr> stats; ///< over dataset-level medians; empty if none defined
};

struct Aggregate {
    std::array<ResultTable, 3> tables; ///< indexed as all_metrics
    std::vector<LearnerSummary> summaries;

    const ResultTable& table(Metric metric) const;
};

struct AggregateOrder {
    std::vector<std::string> datasets;
    std::vector<std::string> learners;
};

/// Table cells are medians over each (dataset, learner) group's defined
/// values; summaries are median and IQR of a learner's cells. Rows and
/// columns are sorted by name unless `order` lists them.
Aggregate aggregate(std::span<const RunRecord> records, const std::optional<AggregateOrder>& order = std::nullopt);

/// First-appearance order of datasets and learners.
AggregateOrder appearance_order(std::span<const RunRecord> records);

/// Every defined value of `metric` across records.
std::vector<double> raw_values(std::span<const RunRecord> records, Metric metric);

nlohmann::ordered_json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const FitFailure& failure);

/// One JSON document per line; wall times are not written.
void write_records_jsonl(const std::filesystem::path& path, std::span<const RunRecord> records);
std::vector<RunRecord> read_records_jsonl(const std::filesystem::path& path);

} // namespace lowdim

#endif
