#ifndef LOWDIM_DATASET_HPP
#define LOWDIM_DATASET_HPP

#include "lowdim/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lowdim {

/// Binary-labelled feature table. Label 1 is the positive (actionable) class.
///
/// Invariants (checked by validate()): at least one row and one column,
/// labels.size() == rows, every label in {0, 1}, every feature finite,
/// feature_names.size() == cols.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::string name;

    std::size_t size() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }
    std::size_t positives() const;

    void validate() const;
};

/// Builds and validates a dataset. Empty feature_names are filled with x0, x1, ...
Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::vector<std::string> feature_names = {}, std::string name = {});

struct CsvOptions {
    /// Header name of the label column; a bare integer that is not a header
    /// name is taken as a 0-based column index.
    std::string label_column = "label";
    /// Cells equal to this string map to class 1, everything else to 0.
    std::string positive_label = "1";
    /// Treat every column as a feature and set all labels to 0.
    bool unlabeled = false;
};

/// Loads a headed CSV. Row order is preserved; the dataset name is the file stem.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes the dataset with a trailing "label" column holding 0/1.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_name = "label");

/// Fraction of rows labelled 1.
double class_ratio(const Dataset& data);

/// Deterministic row permutation.
Dataset shuffle(const Dataset& data, std::uint64_t seed);

/// Rows `indices` of `data`, in the given order.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

/// Per-feature min-max scaling to [0, 1]; constant columns map to 0.
Dataset min_max_normalize(const Dataset& data);

struct SplitPlan {
    std::uint64_t seed = 0;
    std::size_t n_bins = 0;
    std::vector<std::size_t> bin_assignments;

    /// Row indices of each bin, ascending.
    std::vector<std::vector<std::size_t>> bins() const;
};

/// Stratified partition into n_bins bins: rows of each class are shuffled
/// and dealt round-robin, the negatives continuing where the positives
/// stopped, so bin sizes and per-bin positive counts each differ by at most one.
SplitPlan stratified_bins(const Dataset& data, std::size_t n_bins, std::uint64_t seed);

enum class SyntheticKind { uniform_cube, embedded_line };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::uniform_cube;
    std::size_t ambient_dim = 1;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
};

/// uniform_cube: i.i.d. U[0,1] coordinates. embedded_line: t*v + b with
/// t ~ U[0,1], v a random unit vector and b a random offset in [0,1]^d.
/// Labels are all 0.
Dataset generate(const SyntheticSpec& spec);

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& text);

} // namespace lowdim

#endif
