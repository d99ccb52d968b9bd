#include "internal.hpp"

#include "lowdim/error.hpp"

#include <cmath>
#include <numeric>

namespace lowdim {

RandomForest::RandomForest(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {
    if (trees_.empty()) throw Error("random forest needs at least one tree");
    for (const auto& tree : trees_) {
        if (tree.n_features() != trees_.front().n_features()) throw Error("forest trees disagree on feature count");
    }
}

std::size_t RandomForest::n_features() const { return trees_.front().n_features(); }

double RandomForest::score_row(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& tree : trees_) votes += static_cast<std::size_t>(tree.predict_row(x));
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

std::unique_ptr<RandomForest> fit_random_forest(const Dataset& train, const TrainConfig& config) {
    detail::require_trainable(train, config);
    const std::size_t n = train.size();
    const std::size_t n_features = train.n_features();
    std::size_t max_features = config.forest.max_features;
    if (max_features == 0) {
        max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(double(n_features)))));
    }
    const TreeGrowth growth{config.tree.max_depth, config.tree.min_samples_split, max_features};
    const ClassWeights weights = class_weights(train.labels, config.class_weighted);

    std::vector<DecisionTree> trees;
    trees.reserve(config.forest.n_trees);
    for (std::size_t t = 0; t < config.forest.n_trees; ++t) {
        Rng rng(derive_seed(config.seed, t));
        std::vector<std::size_t> sample(n);
        if (config.forest.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        trees.push_back(grow_tree(train.features, train.labels, sample, weights, growth, &rng));
    }
    return std::make_unique<RandomForest>(std::move(trees));
}

} // namespace lowdim
