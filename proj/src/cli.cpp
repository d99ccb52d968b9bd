#include "lowdim/cli.hpp"

#include "lowdim/csv.hpp"
#include "lowdim/dataset.hpp"
#include "lowdim/error.hpp"
#include "lowdim/intrinsic_dim.hpp"
#include "lowdim/rig.hpp"
#include "lowdim/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace lowdim::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* tool_version = "1.0.0";

struct CommonDataFlags {
    std::string label_col = "label";
    std::string positive_label = "1";
    bool unlabeled = false;

    CsvOptions options() const { return {label_col, positive_label, unlabeled}; }
    ojson json() const {
        return {{"label_col", label_col}, {"positive_label", positive_label}, {"no_label", unlabeled}};
    }
};

struct EstimatorFlags {
    std::string norm = "l1";
    std::size_t steps = 50;
    std::size_t window = 3;
    long long min_pairs = -1; ///< < 0: size-dependent default
    bool normalize = false;

    EstimatorOptions options() const {
        EstimatorOptions o;
        o.norm = norm_from_string(norm);
        o.steps = steps;
        o.window = window;
        o.normalize = normalize;
        if (min_pairs >= 0) o.min_pairs = static_cast<std::uint64_t>(min_pairs);
        return o;
    }
    ojson json() const {
        return {{"norm", norm},
                {"steps", steps},
                {"window", window},
                {"min_pairs", min_pairs < 0 ? ojson("auto") : ojson(min_pairs)},
                {"normalize", normalize}};
    }
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags& flags) {
    cmd->add_option("--norm", flags.norm, "Distance norm: l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--steps", flags.steps, "Number of log-spaced radii")->check(CLI::Range(4, 100000));
    cmd->add_option("--window", flags.window, "Odd moving-average width for the slopes");
    cmd->add_option("--min-pairs", flags.min_pairs,
                    "Drop radii counting fewer pairs (default: min(100, 1% of pairs))");
    cmd->add_flag("--normalize", flags.normalize, "Min-max scale each feature before measuring distances");
}

void add_data_flags(CLI::App* cmd, CommonDataFlags& flags) {
    cmd->add_option("--label-col", flags.label_col, "Label column name or 0-based index");
    cmd->add_option("--positive-label", flags.positive_label, "Label value mapped to class 1");
    cmd->add_flag("--no-label", flags.unlabeled, "Treat every column as a feature");
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& inputs,
                    ojson flags) {
    ojson manifest{{"tool", "lowdim"},
                   {"version", tool_version},
                   {"command", command},
                   {"inputs", inputs},
                   {"flags", std::move(flags)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string dataset_name_from(const fs::path& train) {
    std::string stem = train.stem().string();
    for (const char* suffix : {"_train", "-train", ".train"}) {
        const std::string s = suffix;
        if (stem.size() > s.size() && stem.ends_with(s)) return stem.substr(0, stem.size() - s.size());
    }
    return stem;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text + ",") {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else if (c != ' ') {
            item.push_back(c);
        }
    }
    return out;
}

struct ReportFlags {
    double d_fraction = default_d_fraction;
    std::string threshold_source = "medians";
    std::vector<std::string> threshold_overrides; ///< metric=value

    ojson json() const {
        return {{"d_fraction", d_fraction},
                {"threshold_source", threshold_source},
                {"threshold", threshold_overrides}};
    }
};

void add_report_flags(CLI::App* cmd, ReportFlags& flags) {
    cmd->add_option("--d-fraction", flags.d_fraction, "Cohen's d multiplier of the pooled standard deviation")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threshold-source", flags.threshold_source,
                    "Pool for the standard deviation: medians (table cells) or raw (every record)")
        ->check(CLI::IsMember({"medians", "raw"}));
    cmd->add_option("--threshold", flags.threshold_overrides,
                    "Fixed winner window for a metric, e.g. recall=0.03 (repeatable)");
}

std::map<Metric, double> parse_overrides(const std::vector<std::string>& items) {
    std::map<Metric, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("--threshold expects metric=value, got '" + item + "'");
        const auto value = csv::parse_double(item.substr(eq + 1));
        if (!value || *value < 0.0) throw Error("--threshold value must be a non-negative number: '" + item + "'");
        out[metric_from_string(item.substr(0, eq))] = *value;
    }
    return out;
}

/// Writes tables/ and report.txt under `dir`; returns the text report.
std::string write_report(std::span<const RunRecord> records, const AggregateOrder& order, const ReportFlags& flags,
                         const fs::path& dir) {
    const Aggregate agg = aggregate(records, order);
    const auto overrides = parse_overrides(flags.threshold_overrides);

    std::string text;
    csv::Table summary;
    summary.header = {"learner", "metric", "median", "iqr"};
    for (Metric metric : all_metrics) {
        const ResultTable& table = agg.table(metric);
        double threshold = 0.0;
        if (auto it = overrides.find(metric); it != overrides.end()) {
            threshold = it->second;
        } else {
            const std::vector<double> pool =
                flags.threshold_source == "raw" ? raw_values(records, metric) : table.defined_values();
            threshold = pool.size() >= 2 ? cohens_threshold(pool, flags.d_fraction) : 0.0;
        }
        const WinnerMarking marking = mark_winners(table, threshold, direction_of(metric));
        const std::string suffix = to_string(metric);
        csv::write(dir / "tables" / ("metric_" + suffix + ".csv"), table_csv(table));
        csv::write(dir / "tables" / ("winners_" + suffix + ".csv"), winners_csv(table, marking));
        text += render_text(table, marking) + "\n";
    }

    text += "per-learner median (IQR) over datasets\n";
    for (const auto& s : agg.summaries) {
        summary.rows.push_back({s.learner, to_string(s.metric), s.stats ? csv::format_double(s.stats->median) : "",
                                s.stats ? csv::format_double(s.stats->iqr) : ""});
        if (s.metric != Metric::recall) continue;
        std::string line = "  " + s.learner + ":";
        for (const auto& t : agg.summaries) {
            if (t.learner != s.learner) continue;
            line += "  " + to_string(t.metric) + " " +
                    (t.stats ? fixed(t.stats->median * 100, 1) + "% (" + fixed(t.stats->iqr * 100, 1) + ")" : "n/a");
        }
        text += line + "\n";
    }
    csv::write(dir / "tables" / "summary.csv", summary);
    write_text(dir / "report.txt", text);
    return text;
}

int cmd_dim(const std::string& input, const CommonDataFlags& data_flags, const EstimatorFlags& est_flags,
            const fs::path& out_dir, std::ostream& out) {
    const Dataset data = load_csv(input, data_flags.options());
    const EstimatorOptions options = est_flags.options();
    const DimensionEstimate est = estimate_dimension(data, options);

    ojson flags = est_flags.json();
    flags.update(data_flags.json());
    write_manifest(out_dir, "dim", {input}, flags);
    write_text(out_dir / "estimate.json", estimate_summary(est, data.name, options).dump(2) + "\n");
    export_curve(est, out_dir / "curves" / (data.name + ".csv"));

    out << data.name << ": intrinsic dimension " << fixed(est.value, 4) << " (" << data.size() << " rows, "
        << data.n_features() << " features, norm " << est_flags.norm << ", " << est.usable_points
        << " usable radii)\n";
    return 0;
}

int cmd_synth(const std::string& kind, std::size_t dim, std::size_t samples, std::uint64_t seed,
              const fs::path& out_dir, std::ostream& out) {
    const SyntheticSpec spec{synthetic_kind_from_string(kind), dim, samples, seed};
    const Dataset data = generate(spec);
    const fs::path file = out_dir / (data.name + "_seed" + std::to_string(seed) + ".csv");
    save_csv(data, file);
    write_manifest(out_dir, "synth", {},
                   {{"kind", to_string(spec.kind)}, {"dim", dim}, {"samples", samples}, {"seed", seed}});
    out << "wrote " << file.string() << "\n";
    return 0;
}

int cmd_verify(const std::vector<std::size_t>& dims, std::size_t samples, std::size_t seeds, std::uint64_t seed,
               const EstimatorFlags& est_flags, const fs::path& out_dir, std::ostream& out) {
    if (dims.empty()) throw Error("verify needs at least one dimension");
    if (seeds == 0) throw Error("verify needs at least one seed");
    const EstimatorOptions options = est_flags.options();

    csv::Table runs{{"d", "seed", "estimate"}, {}};
    csv::Table summary{{"d", "mean_estimate", "min_estimate", "max_estimate", "relative_error"}, {}};
    out << "     d   mean est    min      max    rel.err\n";
    for (std::size_t d : dims) {
        std::vector<double> values;
        for (std::size_t k = 0; k < seeds; ++k) {
            const std::uint64_t run_seed = seed + k;
            const Dataset cube = generate({SyntheticKind::uniform_cube, d, samples, run_seed});
            const double v = estimate_dimension(cube, options).value;
            values.push_back(v);
            runs.rows.push_back({std::to_string(d), std::to_string(run_seed), csv::format_double(v)});
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double rel = (mean - static_cast<double>(d)) / static_cast<double>(d);
        summary.rows.push_back({std::to_string(d), csv::format_double(mean), csv::format_double(*lo),
                                csv::format_double(*hi), csv::format_double(rel)});
        char line[128];
        std::snprintf(line, sizeof(line), "%6zu %10.3f %8.3f %8.3f %+9.1f%%\n", d, mean, *lo, *hi, rel * 100.0);
        out << line;
    }
    csv::write(out_dir / "verify.csv", runs);
    csv::write(out_dir / "verify_summary.csv", summary);

    std::vector<std::size_t> dims_copy = dims;
    ojson flags = est_flags.json();
    flags.update(ojson{{"dims", dims_copy}, {"samples", samples}, {"seeds", seeds}, {"seed", seed}});
    write_manifest(out_dir, "verify", {}, flags);
    return 0;
}

struct BenchFlags {
    std::string learners = "dnn_weighted,dnn,random_forest,decision_tree,linear_svm";
    std::size_t repeats = 10;
    std::size_t bins = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

int cmd_bench(const std::vector<std::string>& inputs, const CommonDataFlags& data_flags, const BenchFlags& bench,
              const ReportFlags& report, const fs::path& out_dir, std::ostream& out) {
    if (inputs.size() < 2 || inputs.size() % 2 != 0) {
        throw Error("bench expects train/test CSV pairs: TRAIN TEST [TRAIN TEST ...]");
    }
    ExperimentPlan plan;
    plan.n_repeats = bench.repeats;
    plan.n_bins = bench.bins;
    plan.base_seed = bench.seed;
    plan.threads = bench.threads;
    for (const auto& name : split_list(bench.learners)) plan.learners.push_back(learner_spec(name));
    for (std::size_t i = 0; i < inputs.size(); i += 2) {
        plan.datasets.push_back({dataset_name_from(inputs[i]), load_csv(inputs[i], data_flags.options()),
                                 load_csv(inputs[i + 1], data_flags.options())});
    }

    const ExperimentResult result = run_experiment(plan);

    ojson flags{{"learners", bench.learners},
                {"repeats", bench.repeats},
                {"bins", bench.bins},
                {"seed", bench.seed},
                {"threads", bench.threads}};
    flags.update(data_flags.json());
    flags.update(report.json());
    write_manifest(out_dir, "bench", inputs, flags);
    write_records_jsonl(out_dir / "records.jsonl", result.records);
    {
        std::string failures, timings;
        for (const auto& f : result.failures) failures += to_json(f).dump() + "\n";
        for (const auto& r : result.records) {
            if (r.bin != 0) continue;
            timings += ojson{{"dataset", r.dataset},
                             {"learner", r.learner},
                             {"repeat", r.repeat},
                             {"wall_time_seconds", r.wall_time_seconds}}
                           .dump() +
                       "\n";
        }
        write_text(out_dir / "failures.jsonl", failures);
        write_text(out_dir / "timings.jsonl", timings);
    }
    for (const auto& f : result.failures) {
        out << "warning: " << f.learner << " on " << f.dataset << " (repeat " << f.repeat
            << ") failed: " << f.message << "\n";
    }
    if (result.records.empty()) throw Error("every fit failed; no records produced");

    AggregateOrder order;
    for (const auto& pair : plan.datasets) order.datasets.push_back(pair.name);
    for (const auto& learner : plan.learners) {
        const bool ran = std::any_of(result.records.begin(), result.records.end(),
                                     [&](const RunRecord& r) { return r.learner == learner.name; });
        if (ran && std::find(order.learners.begin(), order.learners.end(), learner.name) == order.learners.end()) {
            order.learners.push_back(learner.name);
        }
    }
    order.datasets.erase(std::remove_if(order.datasets.begin(), order.datasets.end(),
                                        [&](const std::string& name) {
                                            return std::none_of(result.records.begin(), result.records.end(),
                                                                [&](const RunRecord& r) { return r.dataset == name; });
                                        }),
                         order.datasets.end());
    out << write_report(result.records, order, report, out_dir);
    out << result.records.size() << " records written to " << (out_dir / "records.jsonl").string() << "\n";
    return 0;
}

int cmd_report(const std::string& input, const ReportFlags& report, const fs::path& out_dir, std::ostream& out) {
    const std::vector<RunRecord> records = read_records_jsonl(input);
    write_manifest(out_dir, "report", {input}, report.json());
    out << write_report(records, appearance_order(records), report, out_dir);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intrinsic-dimensionality estimation and learner-comparison toolkit", "lowdim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    std::string out_dir = "out";

    // dim
    auto* dim = app.add_subcommand("dim", "Estimate the intrinsic dimension of a CSV dataset");
    std::string dim_input;
    CommonDataFlags dim_data;
    EstimatorFlags dim_est;
    dim->add_option("dataset", dim_input, "Input CSV")->required();
    add_data_flags(dim, dim_data);
    add_estimator_flags(dim, dim_est);
    dim->add_option("--out", out_dir, "Output directory");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
    std::string synth_kind = "uniform_cube";
    std::size_t synth_dim = 5, synth_samples = 1000;
    std::uint64_t synth_seed = 0;
    synth->add_option("--kind", synth_kind, "uniform_cube or embedded_line");
    synth->add_option("--dim", synth_dim, "Ambient dimension")->check(CLI::PositiveNumber);
    synth->add_option("--samples", synth_samples, "Number of rows")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Random seed");
    synth->add_option("--out", out_dir, "Output directory");

    // verify
    auto* verify = app.add_subcommand("verify", "Check the estimator on uniform random cubes");
    std::string verify_dims = "5,10,20,40";
    std::size_t verify_samples = 1000, verify_seeds = 10;
    std::uint64_t verify_seed = 0;
    EstimatorFlags verify_est;
    verify->add_option("--dims", verify_dims, "Comma-separated cube dimensions");
    verify->add_option("--samples", verify_samples, "Rows per cube")->check(CLI::Range(3, 1000000));
    verify->add_option("--seeds", verify_seeds, "Cubes per dimension")->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed, "Base random seed");
    add_estimator_flags(verify, verify_est);
    verify->add_option("--out", out_dir, "Output directory");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the repeated stratified learner comparison");
    std::vector<std::string> bench_inputs;
    CommonDataFlags bench_data;
    BenchFlags bench_flags;
    ReportFlags bench_report;
    bench->add_option("datasets", bench_inputs, "TRAIN.csv TEST.csv [TRAIN.csv TEST.csv ...]")->required();
    add_data_flags(bench, bench_data);
    bench->add_option("--learners", bench_flags.learners,
                      "Comma-separated: dnn_weighted, dnn, random_forest, decision_tree, linear_svm");
    bench->add_option("--repeats", bench_flags.repeats, "Shuffle repeats")->check(CLI::PositiveNumber);
    bench->add_option("--bins", bench_flags.bins, "Stratified test bins")->check(CLI::Range(2, 1000000));
    bench->add_option("--seed", bench_flags.seed, "Base random seed");
    bench->add_option("--threads", bench_flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    add_report_flags(bench, bench_report);
    bench->add_option("--out", out_dir, "Output directory");

    // report
    auto* report = app.add_subcommand("report", "Mark winners in recorded results");
    std::string report_input;
    ReportFlags report_flags;
    report->add_option("records", report_input, "records.jsonl from bench")->required();
    add_report_flags(report, report_flags);
    report->add_option("--out", out_dir, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*dim) return cmd_dim(dim_input, dim_data, dim_est, out_dir, out);
        if (*synth) return cmd_synth(synth_kind, synth_dim, synth_samples, synth_seed, out_dir, out);
        if (*verify) {
            std::vector<std::size_t> dims;
            for (const auto& item : split_list(verify_dims)) {
                const auto v = csv::parse_double(item);
                if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
                    throw Error("--dims entries must be positive integers, got '" + item + "'");
                }
                dims.push_back(static_cast<std::size_t>(*v));
            }
            return cmd_verify(dims, verify_samples, verify_seeds, verify_seed, verify_est, out_dir, out);
        }
        if (*bench) return cmd_bench(bench_inputs, bench_data, bench_flags, bench_report, out_dir, out);
        if (*report) return cmd_report(report_input, report_flags, out_dir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace lowdim::cli
