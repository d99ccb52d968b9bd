#include "support.hpp"

#include "lowdim/cli.hpp"
#include "lowdim/csv.hpp"
#include "lowdim/intrinsic_dim.hpp"

#include <doctest.h>

#include <json.hpp>

#include <sstream>

using namespace lowdim;
using lowdim::testing::scratch_dir;
using lowdim::testing::slurp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

void write_blob_pair(const fs::path& dir, std::size_t n) {
    save_csv(lowdim::testing::separable_blobs(n, n / 5, 1), dir / "blobs_train.csv");
    save_csv(lowdim::testing::separable_blobs(n, n / 5, 2), dir / "blobs_test.csv");
}

std::string derby_records() {
    const std::vector<std::string> learners{"dnn_weighted", "cnn", "dnn", "random_forest", "decision_tree", "linear_svm"};
    const double recall[] = {0.966, 0.969, 0.940, 0.920, 0.948, 0.978};
    const double pf[] = {0.012, 0.108, 0.005, 0.003, 0.005, 0.013};
    std::string text;
    for (std::size_t i = 0; i < learners.size(); ++i) {
        nlohmann::ordered_json rec{{"dataset", "derby"}, {"learner", learners[i]}, {"repeat", 0}, {"bin", 0},
                                   {"recall", recall[i]}, {"false_alarm", pf[i]}, {"auc", 0.9}};
        text += rec.dump() + "\n";
    }
    return text;
}

std::vector<std::string> winner_flags(const fs::path& file) {
    auto t = csv::read(file);
    REQUIRE(t.rows.size() == 1);
    return {t.rows[0].begin() + 1, t.rows[0].end()};
}

} // namespace

TEST_CASE("dim matches the library call and writes its outputs") {
    auto dir = scratch_dir("cli_dim");
    Dataset cube = generate({SyntheticKind::uniform_cube, 5, 300, 2});
    save_csv(cube, dir / "cube5.csv");
    auto r = run_cli({"dim", (dir / "cube5.csv").string(), "--steps", "50", "--window", "3", "--out",
                      (dir / "out").string()});
    REQUIRE(r.code == 0);
    EstimatorOptions opts;
    opts.steps = 50;
    opts.window = 3;
    const double expected = estimate_dimension(load_csv(dir / "cube5.csv"), opts).value;
    auto summary = nlohmann::json::parse(slurp(dir / "out" / "estimate.json"));
    CHECK(summary["value"].get<double>() == expected);
    CHECK(fs::exists(dir / "out" / "curves" / "cube5.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(r.out.find("intrinsic dimension") != std::string::npos);
}

TEST_CASE("dim on two points fails with a nonzero exit") {
    auto dir = scratch_dir("cli_dim2");
    lowdim::testing::write_file(dir / "twopoints.csv", "a,b,label\n0,0,0\n1,1,1\n");
    auto r = run_cli({"dim", (dir / "twopoints.csv").string(), "--out", (dir / "out").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("need at least 3 rows") != std::string::npos);
}

TEST_CASE("bad usage exits nonzero") {
    CHECK(run_cli({}).code != 0);
    CHECK(run_cli({"dim"}).code != 0);
    CHECK(run_cli({"dim", "x.csv", "--norm", "l3"}).code != 0);
    CHECK(run_cli({"report", "/nonexistent/records.jsonl", "--out", scratch_dir("cli_bad").string()}).code != 0);
}

TEST_CASE("synth then dim") {
    auto dir = scratch_dir("cli_synth");
    auto r = run_cli({"synth", "--kind", "embedded_line", "--dim", "10", "--samples", "500", "--seed", "3", "--out",
                      dir.string()});
    REQUIRE(r.code == 0);
    const fs::path file = dir / "embedded_line_d10_s500_seed3.csv";
    REQUIRE(fs::exists(file));
    auto d = run_cli({"dim", file.string(), "--out", (dir / "dim").string()});
    CHECK(d.code == 0);
}

TEST_CASE("verify writes per-seed and summary tables") {
    auto dir = scratch_dir("cli_verify");
    auto r = run_cli({"verify", "--dims", "1,3", "--samples", "200", "--seeds", "3", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(csv::read(dir / "verify.csv").rows.size() == 6);
    auto summary = csv::read(dir / "verify_summary.csv");
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0][0] == "1");
}

TEST_CASE("bench builds tables with one column per learner and is reproducible") {
    auto dir = scratch_dir("cli_bench");
    write_blob_pair(dir, 100);
    auto args = [&](const std::string& out) {
        return std::vector<std::string>{"bench", (dir / "blobs_train.csv").string(), (dir / "blobs_test.csv").string(),
                                        "--learners", "svm,tree", "--repeats", "2", "--seed", "5", "--out", out};
    };
    auto a = run_cli(args((dir / "a").string()));
    REQUIRE(a.code == 0);
    auto b = run_cli(args((dir / "b").string()));
    REQUIRE(b.code == 0);

    auto table = csv::read(dir / "a" / "tables" / "metric_recall.csv");
    CHECK(table.header == std::vector<std::string>{"dataset", "linear_svm", "decision_tree"});
    CHECK(table.rows[0][0] == "blobs");

    std::istringstream lines(slurp(dir / "a" / "records.jsonl"));
    std::size_t count = 0;
    for (std::string line; std::getline(lines, line);) ++count;
    CHECK(count == 2 * 2 * 5);

    for (const char* file : {"records.jsonl", "manifest.json", "report.txt", "tables/metric_recall.csv",
                             "tables/metric_pf.csv", "tables/metric_auc.csv", "tables/winners_recall.csv",
                             "tables/summary.csv"}) {
        CAPTURE(file);
        CHECK(slurp(dir / "a" / file) == slurp(dir / "b" / file));
    }
}

TEST_CASE("report reproduces the derby gray cells") {
    auto dir = scratch_dir("cli_report");
    lowdim::testing::write_file(dir / "records.jsonl", derby_records());
    auto r = run_cli({"report", (dir / "records.jsonl").string(), "--threshold", "recall=0.03", "--threshold",
                      "pf=0.02", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(winner_flags(dir / "tables" / "winners_recall.csv") ==
          std::vector<std::string>{"1", "1", "0", "0", "1", "1"});
    CHECK(winner_flags(dir / "tables" / "winners_pf.csv") == std::vector<std::string>{"1", "0", "1", "1", "1", "1"});

    auto zero = run_cli({"report", (dir / "records.jsonl").string(), "--d-fraction", "0", "--out",
                         (dir / "zero").string()});
    REQUIRE(zero.code == 0);
    CHECK(winner_flags(dir / "zero" / "tables" / "winners_recall.csv") ==
          std::vector<std::string>{"0", "0", "0", "0", "0", "1"});
}

TEST_CASE("report with a single learner marks every cell") {
    auto dir = scratch_dir("cli_single");
    std::string text;
    for (const char* ds : {"a", "b", "c"}) {
        text += nlohmann::ordered_json{{"dataset", ds}, {"learner", "tree"}, {"repeat", 0}, {"bin", 0},
                                       {"recall", 0.5}, {"false_alarm", 0.25}, {"auc", 0.75}}
                    .dump() +
                "\n";
    }
    lowdim::testing::write_file(dir / "records.jsonl", text);
    REQUIRE(run_cli({"report", (dir / "records.jsonl").string(), "--out", dir.string()}).code == 0);
    for (const char* m : {"recall", "pf", "auc"}) {
        auto t = csv::read(dir / "tables" / (std::string("winners_") + m + ".csv"));
        for (const auto& row : t.rows) CHECK(row[1] == "1");
    }
}

TEST_CASE("report on an empty records file fails") {
    auto dir = scratch_dir("cli_empty");
    lowdim::testing::write_file(dir / "records.jsonl", "");
    auto r = run_cli({"report", (dir / "records.jsonl").string(), "--out", dir.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("no run records") != std::string::npos);
}
