#include "internal.hpp"

#include "lowdim/error.hpp"

namespace lowdim {

using nlohmann::json;

namespace {

void expect_kind(const json& doc, LearnerKind kind) {
    if (!doc.contains("kind") || doc.at("kind").get<std::string>() != to_string(kind)) {
        throw Error("model document is not a " + to_string(kind));
    }
}

json standardizer_to_json(const Standardizer& s) { return {{"means", s.means}, {"scales", s.scales}}; }

Standardizer standardizer_from_json(const json& doc) {
    return {doc.at("means").get<std::vector<double>>(), doc.at("scales").get<std::vector<double>>()};
}

} // namespace

json detail::tree_nodes_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes()) {
        if (node.feature < 0) {
            nodes.push_back({{"value", node.value}});
        } else {
            nodes.push_back({{"feature", node.feature},
                             {"threshold", node.threshold},
                             {"left", node.left},
                             {"right", node.right},
                             {"value", node.value}});
        }
    }
    return {{"n_features", tree.n_features()}, {"nodes", std::move(nodes)}};
}

DecisionTree detail::tree_from_nodes_json(const json& doc) {
    std::vector<DecisionTree::Node> nodes;
    for (const auto& item : doc.at("nodes")) {
        DecisionTree::Node node;
        node.value = item.at("value").get<double>();
        if (item.contains("feature")) {
            node.feature = item.at("feature").get<int>();
            node.threshold = item.at("threshold").get<double>();
            node.left = item.at("left").get<int>();
            node.right = item.at("right").get<int>();
        }
        nodes.push_back(node);
    }
    return DecisionTree(doc.at("n_features").get<std::size_t>(), std::move(nodes));
}

json DecisionTree::to_json() const {
    json doc = detail::tree_nodes_to_json(*this);
    doc["kind"] = to_string(kind());
    return doc;
}

std::unique_ptr<DecisionTree> DecisionTree::from_json(const json& doc) {
    expect_kind(doc, LearnerKind::decision_tree);
    return std::make_unique<DecisionTree>(detail::tree_from_nodes_json(doc));
}

json RandomForest::to_json() const {
    json trees = json::array();
    for (const auto& tree : trees_) trees.push_back(detail::tree_nodes_to_json(tree));
    return {{"kind", to_string(kind())}, {"n_trees", trees_.size()}, {"trees", std::move(trees)}};
}

std::unique_ptr<RandomForest> RandomForest::from_json(const json& doc) {
    expect_kind(doc, LearnerKind::random_forest);
    std::vector<DecisionTree> trees;
    for (const auto& item : doc.at("trees")) trees.push_back(detail::tree_from_nodes_json(item));
    return std::make_unique<RandomForest>(std::move(trees));
}

json LinearSvm::to_json() const {
    return {{"kind", to_string(kind())}, {"weights", weights_}, {"bias", bias_}, {"training_log", training_log_}};
}

std::unique_ptr<LinearSvm> LinearSvm::from_json(const json& doc) {
    expect_kind(doc, LearnerKind::linear_svm);
    return std::make_unique<LinearSvm>(doc.at("weights").get<std::vector<double>>(), doc.at("bias").get<double>(),
                                       doc.value("training_log", std::vector<double>{}));
}

json Mlp::to_json() const {
    json layers = json::array();
    for (const auto& layer : network_.layers()) {
        layers.push_back({{"inputs", layer.inputs},
                          {"outputs", layer.outputs},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
    }
    return {{"kind", to_string(kind())},
            {"hidden_activation", "relu"},
            {"output_activation", "softmax"},
            {"standardizer", standardizer_to_json(input_)},
            {"layers", std::move(layers)},
            {"training_log", training_log_}};
}

std::unique_ptr<Mlp> Mlp::from_json(const json& doc) {
    expect_kind(doc, LearnerKind::mlp);
    std::vector<DenseLayer> layers;
    for (const auto& item : doc.at("layers")) {
        layers.push_back({item.at("inputs").get<std::size_t>(), item.at("outputs").get<std::size_t>(),
                          item.at("weights").get<std::vector<double>>(), item.at("bias").get<std::vector<double>>()});
    }
    return std::make_unique<Mlp>(standardizer_from_json(doc.at("standardizer")), Network(std::move(layers)),
                                 doc.value("training_log", std::vector<double>{}));
}

std::unique_ptr<Model> model_from_json(const json& doc) {
    try {
        const LearnerKind kind = learner_kind_from_string(doc.at("kind").get<std::string>());
        switch (kind) {
        case LearnerKind::decision_tree: return DecisionTree::from_json(doc);
        case LearnerKind::random_forest: return RandomForest::from_json(doc);
        case LearnerKind::linear_svm: return LinearSvm::from_json(doc);
        case LearnerKind::mlp: return Mlp::from_json(doc);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed model document: ") + e.what());
    }
    throw Error("unknown model kind");
}

} // namespace lowdim
