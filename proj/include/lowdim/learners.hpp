#ifndef LOWDIM_LEARNERS_HPP
#define LOWDIM_LEARNERS_HPP

#include "lowdim/dataset.hpp"
#include "lowdim/matrix.hpp"
#include "lowdim/mlp_network.hpp"
#include "lowdim/random.hpp"
#include "lowdim/training.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lowdim {

enum class LearnerKind { decision_tree, random_forest, linear_svm, mlp };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& text);

struct TreeParams {
    std::size_t max_depth = 0; ///< 0 = unlimited
    std::size_t min_samples_split = 2;
};

struct ForestParams {
    std::size_t n_trees = 100;
    bool bootstrap = true;
    std::size_t max_features = 0; ///< 0 = floor(sqrt(F)), at least 1
};

struct SvmParams {
    double c = 1.0;
    std::size_t max_epochs = 1000;
    bool standardize = true;
};

struct MlpParams {
    std::size_t hidden_layers = 5;
    std::size_t hidden_units = 30;
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    double dropout = 0.2;
    bool standardize = true;
};

struct TrainConfig {
    std::uint64_t seed = 0;
    std::size_t max_epochs = 100; ///< MLP epochs; the SVM uses svm.max_epochs
    std::size_t patience = 3;
    bool class_weighted = false;
    TreeParams tree;
    ForestParams forest;
    SvmParams svm;
    MlpParams mlp;

    void validate() const;
};

/// A trained classifier. Immutable after fit; safe to share across threads.
class Model {
public:
    virtual ~Model() = default;

    virtual LearnerKind kind() const = 0;
    virtual std::size_t n_features() const = 0;
    /// predict(x) = 1 iff score(x) >= threshold().
    virtual double threshold() const { return 0.5; }
    virtual double score_row(std::span<const double> x) const = 0;
    virtual nlohmann::json to_json() const = 0;

    int predict_row(std::span<const double> x) const { return score_row(x) >= threshold() ? 1 : 0; }
    std::vector<double> score(const Matrix& rows) const;
    std::vector<int> predict(const Matrix& rows) const;

    /// Per-epoch training loss (iterative learners only).
    const std::vector<double>& training_log() const { return training_log_; }

protected:
    void check_columns(const Matrix& rows) const;

    std::vector<double> training_log_;
};

/// Binary CART tree over a flat node array; node 0 is the root.
class DecisionTree final : public Model {
public:
    struct Node {
        int feature = -1; ///< -1 marks a leaf
        double threshold = 0.0;
        int left = -1;  ///< x[feature] <= threshold
        int right = -1;
        double value = 0.0; ///< weighted fraction of class 1 in the node
    };

    DecisionTree(std::size_t n_features, std::vector<Node> nodes);

    LearnerKind kind() const override { return LearnerKind::decision_tree; }
    std::size_t n_features() const override { return n_features_; }
    double score_row(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<DecisionTree> from_json(const nlohmann::json& doc);

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t depth() const;

private:
    std::size_t n_features_;
    std::vector<Node> nodes_;
};

struct TreeGrowth {
    std::size_t max_depth = 0;
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0; ///< 0 = all features
};

/// Grows a Gini CART tree on rows `sample` of x (duplicates allowed, as in a
/// bootstrap). Ties between splits go to the lowest feature index, then the
/// lowest threshold. `rng` is only consulted when max_features < F.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> sample,
                       const ClassWeights& weights, const TreeGrowth& growth, Rng* rng);

class RandomForest final : public Model {
public:
    explicit RandomForest(std::vector<DecisionTree> trees);

    LearnerKind kind() const override { return LearnerKind::random_forest; }
    std::size_t n_features() const override;
    /// Fraction of trees voting class 1.
    double score_row(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<RandomForest> from_json(const nlohmann::json& doc);

    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    std::vector<DecisionTree> trees_;
};

/// Linear classifier: score = w . x + b, class 1 iff score >= 0.
class LinearSvm final : public Model {
public:
    LinearSvm(std::vector<double> weights, double bias, std::vector<double> objective_log = {});

    LearnerKind kind() const override { return LearnerKind::linear_svm; }
    std::size_t n_features() const override { return weights_.size(); }
    double threshold() const override { return 0.0; }
    double score_row(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<LinearSvm> from_json(const nlohmann::json& doc);

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    std::vector<double> weights_;
    double bias_;
};

class Mlp final : public Model {
public:
    Mlp(Standardizer input, Network network, std::vector<double> loss_log = {});

    LearnerKind kind() const override { return LearnerKind::mlp; }
    std::size_t n_features() const override { return input_.means.size(); }
    /// Softmax probability of class 1.
    double score_row(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<Mlp> from_json(const nlohmann::json& doc);

    /// Softmax pair (P0, P1) for one raw input row.
    std::array<double, 2> probabilities(std::span<const double> x) const;
    const Network& network() const { return network_; }

private:
    Standardizer input_;
    Network network_;
};

/// Trains one learner. Throws on single-class data, invalid config, or a
/// non-finite loss (message names the epoch). Deterministic in config.seed.
std::unique_ptr<Model> fit(LearnerKind kind, const Dataset& train, const TrainConfig& config);

std::unique_ptr<DecisionTree> fit_decision_tree(const Dataset& train, const TrainConfig& config);
std::unique_ptr<RandomForest> fit_random_forest(const Dataset& train, const TrainConfig& config);
std::unique_ptr<LinearSvm> fit_linear_svm(const Dataset& train, const TrainConfig& config);
std::unique_ptr<Mlp> fit_mlp(const Dataset& train, const TrainConfig& config);

/// Inverse of Model::to_json.
std::unique_ptr<Model> model_from_json(const nlohmann::json& doc);

} // namespace lowdim

#endif
