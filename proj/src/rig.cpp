#include "lowdim/rig.hpp"

#include "lowdim/error.hpp"
#include "lowdim/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

namespace lowdim {

LearnerSpec learner_spec(const std::string& name) {
    if (name == "dnn_weighted" || name == "mlp_weighted") {
        LearnerSpec spec{"dnn_weighted", LearnerKind::mlp, {}};
        spec.config.class_weighted = true;
        return spec;
    }
    if (name == "dnn" || name == "mlp") return {"dnn", LearnerKind::mlp, {}};
    const LearnerKind kind = learner_kind_from_string(name);
    return {to_string(kind), kind, {}};
}

std::vector<LearnerSpec> default_learners() {
    std::vector<LearnerSpec> out;
    for (const char* name : {"dnn_weighted", "dnn", "random_forest", "decision_tree", "linear_svm"}) {
        out.push_back(learner_spec(name));
    }
    return out;
}

void ExperimentPlan::validate() const {
    if (n_repeats < 1) throw Error("experiment needs at least one repeat");
    if (n_bins < 2) throw Error("experiment needs at least two test bins");
    if (datasets.empty()) throw Error("experiment has no datasets");
    if (learners.empty()) throw Error("experiment has no learners");
    for (const auto& pair : datasets) {
        pair.train.validate();
        pair.test.validate();
        if (pair.train.n_features() != pair.test.n_features() ||
            pair.train.feature_names != pair.test.feature_names) {
            throw Error("dataset '" + pair.name + "': train and test feature schemas differ");
        }
    }
    for (const auto& learner : learners) learner.config.validate();
}

namespace {

struct CellOutcome {
    std::vector<RunRecord> records;
    std::optional<FitFailure> failure;
};

CellOutcome run_cell(const ExperimentPlan& plan, std::size_t dataset_index, std::size_t learner_index,
                     std::size_t repeat) {
    const DatasetPair& pair = plan.datasets[dataset_index];
    const LearnerSpec& learner = plan.learners[learner_index];
    const std::uint64_t seed = plan.base_seed + repeat;

    const Dataset train = shuffle(pair.train, derive_seed(seed, 0));
    const Dataset test = shuffle(pair.test, derive_seed(seed, 1));
    const SplitPlan split = stratified_bins(test, plan.n_bins, derive_seed(seed, 2));

    TrainConfig config = learner.config;
    config.seed = seed;

    CellOutcome outcome;
    std::unique_ptr<Model> model;
    const auto start = std::chrono::steady_clock::now();
    try {
        model = fit(learner.kind, train, config);
    } catch (const std::exception& e) {
        outcome.failure = FitFailure{pair.name, learner.name, repeat, e.what()};
        return outcome;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::vector<double> scores = model->score(test.features);
    std::vector<int> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) predictions[i] = scores[i] >= model->threshold() ? 1 : 0;

    const auto bins = split.bins();
    for (std::size_t b = 0; b < bins.size(); ++b) {
        std::vector<int> y, yhat;
        std::vector<double> s;
        for (std::size_t row : bins[b]) {
            y.push_back(test.labels[row]);
            yhat.push_back(predictions[row]);
            s.push_back(scores[row]);
        }
        outcome.records.push_back({pair.name, learner.name, repeat, b, evaluate(y, yhat, s), seconds});
    }
    return outcome;
}

} // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    for (const auto& pair : plan.datasets) {
        if (plan.n_bins > pair.test.size()) {
            throw Error("dataset '" + pair.name + "': test set smaller than the number of bins");
        }
    }

    const std::size_t n_learners = plan.learners.size();
    const std::size_t n_cells = plan.datasets.size() * n_learners * plan.n_repeats;
    std::vector<CellOutcome> outcomes(n_cells);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t cell = next++; cell < n_cells; cell = next++) {
            const std::size_t repeat = cell % plan.n_repeats;
            const std::size_t learner = (cell / plan.n_repeats) % n_learners;
            const std::size_t dataset = cell / (plan.n_repeats * n_learners);
            outcomes[cell] = run_cell(plan, dataset, learner, repeat);
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(plan.threads, n_cells));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    ExperimentResult result;
    for (auto& outcome : outcomes) {
        for (auto& rec : outcome.records) result.records.push_back(std::move(rec));
        if (outcome.failure) result.failures.push_back(std::move(*outcome.failure));
    }
    return result;
}

std::optional<double> metric_value(const MetricsRecord& metrics, Metric metric) {
    switch (metric) {
    case Metric::recall: return metrics.recall;
    case Metric::false_alarm: return metrics.false_alarm;
    case Metric::auc: return metrics.auc;
    }
    return std::nullopt;
}

const ResultTable& Aggregate::table(Metric metric) const { return tables[static_cast<std::size_t>(metric)]; }

AggregateOrder appearance_order(std::span<const RunRecord> records) {
    AggregateOrder order;
    for (const auto& rec : records) {
        if (std::find(order.datasets.begin(), order.datasets.end(), rec.dataset) == order.datasets.end()) {
            order.datasets.push_back(rec.dataset);
        }
        if (std::find(order.learners.begin(), order.learners.end(), rec.learner) == order.learners.end()) {
            order.learners.push_back(rec.learner);
        }
    }
    return order;
}

std::vector<double> raw_values(std::span<const RunRecord> records, Metric metric) {
    std::vector<double> out;
    for (const auto& rec : records) {
        if (auto v = metric_value(rec.metrics, metric)) out.push_back(*v);
    }
    return out;
}

Aggregate aggregate(std::span<const RunRecord> records, const std::optional<AggregateOrder>& order) {
    if (records.empty()) throw Error("nothing to aggregate: no run records");

    AggregateOrder names = order ? *order : appearance_order(records);
    if (!order) {
        std::sort(names.datasets.begin(), names.datasets.end());
        std::sort(names.learners.begin(), names.learners.end());
    }
    auto index_of = [](const std::vector<std::string>& list, const std::string& name) {
        auto it = std::find(list.begin(), list.end(), name);
        if (it == list.end()) throw Error("record name '" + name + "' missing from the requested order");
        return static_cast<std::size_t>(it - list.begin());
    };

    // (metric, dataset, learner) -> defined values
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<double>> groups;
    for (const auto& rec : records) {
        const std::size_t d = index_of(names.datasets, rec.dataset);
        const std::size_t l = index_of(names.learners, rec.learner);
        for (std::size_t m = 0; m < 3; ++m) {
            auto& bucket = groups[{m, d, l}];
            if (auto v = metric_value(rec.metrics, all_metrics[m])) bucket.push_back(*v);
        }
    }

    Aggregate out;
    for (std::size_t m = 0; m < 3; ++m) {
        ResultTable table(all_metrics[m], names.datasets, names.learners);
        for (const auto& [key, values] : groups) {
            const auto& [metric, d, l] = key;
            if (metric == m && !values.empty()) table.at(d, l) = median_iqr(values).median;
        }
        for (std::size_t l = 0; l < names.learners.size(); ++l) {
            std::vector<double> cells;
            for (std::size_t d = 0; d < names.datasets.size(); ++d) {
                if (const auto& cell = table.at(d, l)) cells.push_back(*cell);
            }
            LearnerSummary summary{names.learners[l], all_metrics[m], std::nullopt};
            if (!cells.empty()) summary.stats = median_iqr(cells);
            out.summaries.push_back(summary);
        }
        out.tables[m] = std::move(table);
    }
    return out;
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> read_optional(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<double>();
}

} // namespace

nlohmann::ordered_json to_json(const RunRecord& record) {
    const auto& m = record.metrics;
    return {{"dataset", record.dataset},
            {"learner", record.learner},
            {"repeat", record.repeat},
            {"bin", record.bin},
            {"tp", m.counts.tp},
            {"fp", m.counts.fp},
            {"tn", m.counts.tn},
            {"fn", m.counts.fn},
            {"recall", optional_number(m.recall)},
            {"false_alarm", optional_number(m.false_alarm)},
            {"auc", optional_number(m.auc)}};
}

RunRecord record_from_json(const nlohmann::json& doc) {
    try {
        RunRecord rec;
        rec.dataset = doc.at("dataset").get<std::string>();
        rec.learner = doc.at("learner").get<std::string>();
        rec.repeat = doc.at("repeat").get<std::size_t>();
        rec.bin = doc.at("bin").get<std::size_t>();
        rec.metrics.counts = {doc.value("tp", std::size_t{0}), doc.value("fp", std::size_t{0}),
                              doc.value("tn", std::size_t{0}), doc.value("fn", std::size_t{0})};
        rec.metrics.recall = read_optional(doc, "recall");
        rec.metrics.false_alarm = read_optional(doc, "false_alarm");
        rec.metrics.auc = read_optional(doc, "auc");
        rec.wall_time_seconds = doc.value("wall_time_seconds", 0.0);
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed run record: ") + e.what());
    }
}

nlohmann::ordered_json to_json(const FitFailure& failure) {
    return {{"dataset", failure.dataset},
            {"learner", failure.learner},
            {"repeat", failure.repeat},
            {"error", failure.message}};
}

void write_records_jsonl(const std::filesystem::path& path, std::span<const RunRecord> records) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (const auto& rec : records) out << to_json(rec).dump() << '\n';
    if (!out) throw Error("failed while writing '" + path.string() + "'");
}

std::vector<RunRecord> read_records_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(record_from_json(doc));
    }
    if (records.empty()) throw Error(path.string() + ": no run records");
    return records;
}

} // namespace lowdim
