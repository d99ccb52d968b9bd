#include "internal.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lowdim {

LinearSvm::LinearSvm(std::vector<double> weights, double bias, std::vector<double> objective_log)
    : weights_(std::move(weights)), bias_(bias) {
    if (weights_.empty()) throw Error("linear SVM needs at least one weight");
    training_log_ = std::move(objective_log);
}

double LinearSvm::score_row(std::span<const double> x) const {
    double margin = bias_;
    for (std::size_t i = 0; i < weights_.size(); ++i) margin += weights_[i] * x[i];
    return margin;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

// Pegasos on the L2-regularised hinge loss
//   lambda/2 |w|^2 + (1/n) sum_i c(y_i) max(0, 1 - y_i w.x_i),  lambda = 1/(C n),
// with the bias carried as a constant input column. Rows are visited in
// dataset order every epoch. Each epoch's iterates are averaged, and the
// average with the best objective is kept.
std::unique_ptr<LinearSvm> fit_linear_svm(const Dataset& train, const TrainConfig& config) {
    detail::require_trainable(train, config);
    const std::size_t n = train.size();
    const std::size_t f = train.n_features();
    const ClassWeights cw = class_weights(train.labels, config.class_weighted);
    const Standardizer scaler =
        config.svm.standardize ? Standardizer::fit(train.features) : Standardizer::identity(f);

    Matrix x(n, f + 1);
    for (std::size_t r = 0; r < n; ++r) {
        scaler.apply(train.features.row(r), x.row(r).first(f));
        x(r, f) = 1.0;
    }
    std::vector<double> sign(n), sample_weight(n);
    double mean_weight = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        sign[r] = train.labels[r] == 1 ? 1.0 : -1.0;
        sample_weight[r] = cw.of(train.labels[r]);
        mean_weight += sample_weight[r];
    }
    mean_weight /= static_cast<double>(n);

    const double lambda = 1.0 / (config.svm.c * static_cast<double>(n));
    // The optimum satisfies lambda/2 |w|^2 <= objective(0) = mean_weight.
    const double radius = std::sqrt(2.0 * mean_weight / lambda);

    auto objective = [&](std::span<const double> w) {
        double hinge = 0.0;
        for (std::size_t r = 0; r < n; ++r) hinge += sample_weight[r] * std::max(0.0, 1.0 - sign[r] * dot(w, x.row(r)));
        return 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(n);
    };

    std::vector<double> w(f + 1, 0.0);
    std::vector<double> epoch_mean(f + 1, 0.0);
    std::vector<double> best_w = w;
    double best_objective = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::vector<double> log;
    std::uint64_t t = 0;

    for (std::size_t epoch = 1; epoch <= config.svm.max_epochs; ++epoch) {
        std::fill(epoch_mean.begin(), epoch_mean.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto row = x.row(r);
            const double margin = sign[r] * dot(w, row);
            const double shrink = 1.0 - eta * lambda;
            for (auto& wi : w) wi *= shrink;
            if (margin < 1.0) {
                const double step = eta * sample_weight[r] * sign[r];
                for (std::size_t i = 0; i <= f; ++i) w[i] += step * row[i];
            }
            const double norm = std::sqrt(dot(w, w));
            if (norm > radius) {
                const double scale = radius / norm;
                for (auto& wi : w) wi *= scale;
            }
            for (std::size_t i = 0; i <= f; ++i) epoch_mean[i] += w[i];
        }
        for (auto& v : epoch_mean) v /= static_cast<double>(n);
        const double value = objective(epoch_mean);
        if (!std::isfinite(value)) throw Error("SVM objective became non-finite at epoch " + std::to_string(epoch));
        log.push_back(value);
        if (value < best_objective) {
            best_objective = value;
            best_w = epoch_mean;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }

    // Fold the standardisation into the raw-feature hyperplane.
    std::vector<double> weights(f);
    double bias = best_w[f];
    for (std::size_t i = 0; i < f; ++i) {
        weights[i] = best_w[i] / scaler.scales[i];
        bias -= weights[i] * scaler.means[i];
    }
    return std::make_unique<LinearSvm>(std::move(weights), bias, std::move(log));
}

} // namespace lowdim
