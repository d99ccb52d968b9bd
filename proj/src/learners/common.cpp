#include "lowdim/learners.hpp"
#include "internal.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <cmath>

namespace lowdim {

std::string to_string(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::decision_tree: return "decision_tree";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::linear_svm: return "linear_svm";
    case LearnerKind::mlp: return "mlp";
    }
    return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& text) {
    if (text == "decision_tree" || text == "tree" || text == "dt") return LearnerKind::decision_tree;
    if (text == "random_forest" || text == "forest" || text == "rf") return LearnerKind::random_forest;
    if (text == "linear_svm" || text == "svm") return LearnerKind::linear_svm;
    if (text == "mlp" || text == "dnn") return LearnerKind::mlp;
    throw Error("unknown learner '" + text + "'");
}

ClassWeights class_weights(std::span<const int> labels, bool weighted) {
    if (!weighted) return {};
    const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double neg = static_cast<double>(labels.size()) - pos;
    if (pos == 0.0 || neg == 0.0) throw Error("class weights need both classes present");
    return {neg / pos, 1.0};
}

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s = identity(x.cols());
    if (x.rows() == 0) return s;
    const double n = static_cast<double>(x.rows());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
        mean /= n;
        double var = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
        const double sd = std::sqrt(var / n);
        s.means[c] = mean;
        s.scales[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Standardizer Standardizer::identity(std::size_t n_features) {
    return {std::vector<double>(n_features, 0.0), std::vector<double>(n_features, 1.0)};
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - means[c]) / scales[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) apply(x.row(r), out.row(r));
    return out;
}

void TrainConfig::validate() const {
    if (max_epochs < 1) throw Error("max_epochs must be >= 1");
    if (patience < 1) throw Error("patience must be >= 1");
    if (tree.min_samples_split < 2) throw Error("min_samples_split must be >= 2");
    if (forest.n_trees < 1) throw Error("forest needs at least one tree");
    if (!(svm.c > 0.0)) throw Error("SVM regularization C must be positive");
    if (svm.max_epochs < 1) throw Error("SVM max_epochs must be >= 1");
    if (mlp.hidden_layers < 1 || mlp.hidden_units < 1) throw Error("MLP needs at least one hidden unit");
    if (!(mlp.learning_rate > 0.0)) throw Error("MLP learning rate must be positive");
    if (mlp.batch_size < 1) throw Error("MLP batch size must be >= 1");
    if (!(mlp.dropout >= 0.0 && mlp.dropout < 1.0)) throw Error("MLP dropout must be in [0, 1)");
}

void Model::check_columns(const Matrix& rows) const {
    if (rows.cols() != n_features()) {
        throw Error("model expects " + std::to_string(n_features()) + " features, got " +
                    std::to_string(rows.cols()));
    }
}

std::vector<double> Model::score(const Matrix& rows) const {
    check_columns(rows);
    std::vector<double> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = score_row(rows.row(r));
    return out;
}

std::vector<int> Model::predict(const Matrix& rows) const {
    check_columns(rows);
    std::vector<int> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_row(rows.row(r));
    return out;
}

void detail::require_trainable(const Dataset& train, const TrainConfig& config) {
    config.validate();
    train.validate();
    const std::size_t pos = train.positives();
    if (pos == 0 || pos == train.size()) {
        throw Error("training data for '" + train.name + "' contains a single class");
    }
}

std::unique_ptr<Model> fit(LearnerKind kind, const Dataset& train, const TrainConfig& config) {
    switch (kind) {
    case LearnerKind::decision_tree: return fit_decision_tree(train, config);
    case LearnerKind::random_forest: return fit_random_forest(train, config);
    case LearnerKind::linear_svm: return fit_linear_svm(train, config);
    case LearnerKind::mlp: return fit_mlp(train, config);
    }
    throw Error("unknown learner kind");
}

} // namespace lowdim
