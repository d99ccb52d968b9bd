#ifndef LOWDIM_TRAINING_HPP
#define LOWDIM_TRAINING_HPP

#include "lowdim/matrix.hpp"

#include <span>
#include <vector>

namespace lowdim {

/// Per-class loss multipliers. Weighted: negative = 1, positive = negatives / positives,
/// so equal class counts reduce to the unweighted loss.
struct ClassWeights {
    double positive = 1.0;
    double negative = 1.0;

    double of(int label) const { return label == 1 ? positive : negative; }
};

ClassWeights class_weights(std::span<const int> labels, bool weighted);

/// Column z-scoring fitted on training rows; zero-variance columns keep scale 1.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> scales;

    static Standardizer fit(const Matrix& x);
    static Standardizer identity(std::size_t n_features);

    void apply(std::span<const double> in, std::span<double> out) const;
    Matrix apply(const Matrix& x) const;
};

} // namespace lowdim

#endif
