#include "internal.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace lowdim {

namespace {

// Weighted Gini impurity times node weight: W - (w0^2 + w1^2) / W.
double gini_mass(double w0, double w1) {
    const double total = w0 + w1;
    return total > 0.0 ? total - (w0 * w0 + w1 * w1) / total : 0.0;
}

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
};

class TreeGrower {
public:
    TreeGrower(const Matrix& x, std::span<const int> y, const ClassWeights& weights, const TreeGrowth& growth,
               Rng* rng)
        : x_(x), y_(y), weights_(weights), growth_(growth), rng_(rng) {}

    DecisionTree grow(std::span<const std::size_t> sample) {
        struct Pending {
            int node;
            std::vector<std::size_t> rows;
            std::size_t depth;
        };
        std::vector<DecisionTree::Node> nodes(1);
        std::vector<Pending> stack;
        stack.push_back({0, std::vector<std::size_t>(sample.begin(), sample.end()), 0});

        while (!stack.empty()) {
            Pending item = std::move(stack.back());
            stack.pop_back();

            double w0 = 0.0, w1 = 0.0;
            for (std::size_t r : item.rows) (y_[r] == 1 ? w1 : w0) += weights_.of(y_[r]);
            nodes[item.node].value = (w0 + w1) > 0.0 ? w1 / (w0 + w1) : 0.0;

            const bool pure = w0 == 0.0 || w1 == 0.0;
            const bool too_small = item.rows.size() < growth_.min_samples_split;
            const bool too_deep = growth_.max_depth > 0 && item.depth >= growth_.max_depth;
            if (pure || too_small || too_deep) continue;

            const Split split = best_split(item.rows, w0, w1);
            if (!split.found) continue;

            std::vector<std::size_t> left, right;
            for (std::size_t r : item.rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);

            const int left_id = static_cast<int>(nodes.size());
            nodes.emplace_back();
            const int right_id = static_cast<int>(nodes.size());
            nodes.emplace_back();
            auto& node = nodes[item.node];
            node.feature = static_cast<int>(split.feature);
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = right_id;

            stack.push_back({right_id, std::move(right), item.depth + 1});
            stack.push_back({left_id, std::move(left), item.depth + 1});
        }
        return DecisionTree(x_.cols(), std::move(nodes));
    }

private:
    void scan_feature(std::size_t feature, std::vector<std::size_t>& rows, double w0, double w1, Split& best) const {
        std::sort(rows.begin(), rows.end(),
                  [&](std::size_t a, std::size_t b) { return x_(a, feature) < x_(b, feature); });
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            const int label = y_[rows[i]];
            (label == 1 ? l1 : l0) += weights_.of(label);
            const double here = x_(rows[i], feature);
            const double next = x_(rows[i + 1], feature);
            if (!(here < next)) continue;
            const double impurity = gini_mass(l0, l1) + gini_mass(w0 - l0, w1 - l1);
            if (impurity < best.impurity) {
                double threshold = here + (next - here) / 2.0;
                if (!(threshold < next)) threshold = here;
                best = {true, feature, threshold, impurity};
            }
        }
    }

    Split best_split(const std::vector<std::size_t>& node_rows, double w0, double w1) {
        const std::size_t n_features = x_.cols();
        std::vector<std::size_t> rows = node_rows;
        Split best;

        const bool subsample = growth_.max_features > 0 && growth_.max_features < n_features;
        if (!subsample) {
            for (std::size_t f = 0; f < n_features; ++f) scan_feature(f, rows, w0, w1, best);
            return best;
        }

        std::vector<std::size_t> order(n_features);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), *rng_);
        std::vector<std::size_t> drawn(order.begin(), order.begin() + static_cast<long>(growth_.max_features));
        std::sort(drawn.begin(), drawn.end());
        for (std::size_t f : drawn) scan_feature(f, rows, w0, w1, best);
        // Keep drawing past max_features until some feature admits a split.
        for (std::size_t k = growth_.max_features; !best.found && k < n_features; ++k) {
            scan_feature(order[k], rows, w0, w1, best);
        }
        return best;
    }

    const Matrix& x_;
    std::span<const int> y_;
    ClassWeights weights_;
    TreeGrowth growth_;
    Rng* rng_;
};

} // namespace

DecisionTree::DecisionTree(std::size_t n_features, std::vector<Node> nodes)
    : n_features_(n_features), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("decision tree needs at least one node");
    for (const auto& node : nodes_) {
        if (node.feature < 0) continue;
        const auto size = static_cast<int>(nodes_.size());
        if (static_cast<std::size_t>(node.feature) >= n_features_ || node.left <= 0 || node.right <= 0 ||
            node.left >= size || node.right >= size) {
            throw Error("malformed decision tree node");
        }
    }
}

double DecisionTree::score_row(std::span<const double> x) const {
    const Node* node = &nodes_[0];
    while (node->feature >= 0) {
        node = &nodes_[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
    }
    return node->value;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes_[i].feature >= 0) {
            depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> sample,
                       const ClassWeights& weights, const TreeGrowth& growth, Rng* rng) {
    if (sample.empty()) throw Error("cannot grow a tree on an empty sample");
    if (growth.max_features > 0 && growth.max_features < x.cols() && rng == nullptr) {
        throw Error("feature subsampling needs a random generator");
    }
    return TreeGrower(x, y, weights, growth, rng).grow(sample);
}

std::unique_ptr<DecisionTree> fit_decision_tree(const Dataset& train, const TrainConfig& config) {
    detail::require_trainable(train, config);
    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const TreeGrowth growth{config.tree.max_depth, config.tree.min_samples_split, 0};
    return std::make_unique<DecisionTree>(
        grow_tree(train.features, train.labels, rows, class_weights(train.labels, config.class_weighted), growth,
                  nullptr));
}

} // namespace lowdim
