#include "lowdim/dataset.hpp"

#include "lowdim/csv.hpp"
#include "lowdim/error.hpp"
#include "lowdim/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace lowdim {

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void Dataset::validate() const {
    if (features.rows() == 0) throw Error("dataset '" + name + "' has no rows");
    if (features.cols() == 0) throw Error("dataset '" + name + "' has no feature columns");
    if (labels.size() != features.rows()) {
        throw Error("dataset '" + name + "': " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(features.rows()) + " rows");
    }
    if (feature_names.size() != features.cols()) {
        throw Error("dataset '" + name + "': feature name count does not match columns");
    }
    for (int label : labels) {
        if (label != 0 && label != 1) throw Error("dataset '" + name + "': label outside {0,1}");
    }
    for (double v : features.values()) {
        if (!std::isfinite(v)) throw Error("dataset '" + name + "': non-finite feature value");
    }
}

Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::vector<std::string> feature_names, std::string name) {
    if (feature_names.empty()) {
        for (std::size_t c = 0; c < features.cols(); ++c) feature_names.push_back("x" + std::to_string(c));
    }
    Dataset data{std::move(features), std::move(labels), std::move(feature_names), std::move(name)};
    data.validate();
    return data;
}

namespace {

std::size_t resolve_label_column(const std::vector<std::string>& header, const std::string& spec,
                                 const std::string& source) {
    auto it = std::find(header.begin(), header.end(), spec);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
    if (ec == std::errc{} && ptr == spec.data() + spec.size() && index < header.size()) return index;
    throw Error(source + ": label column '" + spec + "' not found");
}

} // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    const std::string source = path.string();
    csv::Table table = csv::read(path);
    if (table.rows.empty()) throw Error(source + ": no data rows after the header");

    const std::size_t n_cols = table.header.size();
    std::size_t label_col = n_cols;
    if (!options.unlabeled) label_col = resolve_label_column(table.header, options.label_column, source);

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c != label_col) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw Error(source + ": no feature columns besides the label");

    Matrix features(table.rows.size(), feature_cols.size());
    std::vector<int> labels(table.rows.size(), 0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& rec = table.rows[r];
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const std::size_t c = feature_cols[k];
            auto value = csv::parse_double(rec[c]);
            if (!value) {
                throw Error(source + ": row " + std::to_string(r + 1) + ", column '" + table.header[c] +
                            "': cannot parse '" + rec[c] + "' as a finite number");
            }
            features(r, k) = *value;
        }
        if (label_col < n_cols) labels[r] = rec[label_col] == options.positive_label ? 1 : 0;
    }

    std::vector<std::string> names;
    for (std::size_t c : feature_cols) names.push_back(table.header[c]);
    return make_dataset(std::move(features), std::move(labels), std::move(names), path.stem().string());
}

void save_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_name) {
    csv::Table table;
    table.header = data.feature_names;
    table.header.push_back(label_name);
    table.rows.reserve(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        std::vector<std::string> rec;
        rec.reserve(data.n_features() + 1);
        for (double v : data.features.row(r)) rec.push_back(csv::format_double(v));
        rec.push_back(std::to_string(data.labels[r]));
        table.rows.push_back(std::move(rec));
    }
    csv::write(path, table);
}

double class_ratio(const Dataset& data) {
    if (data.size() == 0) throw Error("class_ratio of an empty dataset");
    return static_cast<double>(data.positives()) / static_cast<double>(data.size());
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
    Matrix features(indices.size(), data.n_features());
    std::vector<int> labels(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= data.size()) throw Error("subset index out of range");
        std::ranges::copy(data.features.row(indices[i]), features.row(i).begin());
        labels[i] = data.labels[indices[i]];
    }
    return Dataset{std::move(features), std::move(labels), data.feature_names, data.name};
}

Dataset shuffle(const Dataset& data, std::uint64_t seed) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return subset(data, order);
}

Dataset min_max_normalize(const Dataset& data) {
    Dataset out = data;
    for (std::size_t c = 0; c < data.n_features(); ++c) {
        double lo = data.features(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < data.size(); ++r) {
            lo = std::min(lo, data.features(r, c));
            hi = std::max(hi, data.features(r, c));
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < data.size(); ++r) {
            out.features(r, c) = span > 0.0 ? (data.features(r, c) - lo) / span : 0.0;
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> SplitPlan::bins() const {
    std::vector<std::vector<std::size_t>> out(n_bins);
    for (std::size_t i = 0; i < bin_assignments.size(); ++i) out[bin_assignments[i]].push_back(i);
    return out;
}

SplitPlan stratified_bins(const Dataset& data, std::size_t n_bins, std::uint64_t seed) {
    if (n_bins < 2) throw Error("stratified_bins needs at least 2 bins");
    if (n_bins > data.size()) {
        throw Error("cannot split " + std::to_string(data.size()) + " rows into " + std::to_string(n_bins) +
                    " bins");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < data.size(); ++i) (data.labels[i] == 1 ? pos : neg).push_back(i);

    Rng rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    SplitPlan plan{seed, n_bins, std::vector<std::size_t>(data.size(), 0)};
    std::size_t next = 0;
    for (const auto* group : {&pos, &neg}) {
        for (std::size_t row : *group) {
            plan.bin_assignments[row] = next;
            next = (next + 1) % n_bins;
        }
    }
    return plan;
}

Dataset generate(const SyntheticSpec& spec) {
    if (spec.ambient_dim == 0) throw Error("synthetic ambient dimension must be positive");
    if (spec.n_samples == 0) throw Error("synthetic sample count must be positive");

    const std::size_t d = spec.ambient_dim;
    Rng rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix x(spec.n_samples, d);

    switch (spec.kind) {
    case SyntheticKind::uniform_cube:
        for (std::size_t r = 0; r < spec.n_samples; ++r) {
            for (std::size_t c = 0; c < d; ++c) x(r, c) = unit(rng);
        }
        break;
    case SyntheticKind::embedded_line: {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> direction(d), offset(d);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : direction) {
                v = gauss(rng);
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& v : direction) v /= norm;
        for (auto& v : offset) v = unit(rng);
        for (std::size_t r = 0; r < spec.n_samples; ++r) {
            const double t = unit(rng);
            for (std::size_t c = 0; c < d; ++c) x(r, c) = t * direction[c] + offset[c];
        }
        break;
    }
    }
    std::string name = to_string(spec.kind) + "_d" + std::to_string(d) + "_s" + std::to_string(spec.n_samples);
    return make_dataset(std::move(x), std::vector<int>(spec.n_samples, 0), {}, std::move(name));
}

std::string to_string(SyntheticKind kind) {
    return kind == SyntheticKind::uniform_cube ? "uniform_cube" : "embedded_line";
}

SyntheticKind synthetic_kind_from_string(const std::string& text) {
    if (text == "uniform_cube" || text == "cube") return SyntheticKind::uniform_cube;
    if (text == "embedded_line" || text == "line") return SyntheticKind::embedded_line;
    throw Error("unknown synthetic kind '" + text + "' (expected uniform_cube or embedded_line)");
}

} // namespace lowdim
