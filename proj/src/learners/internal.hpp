#ifndef LOWDIM_LEARNERS_INTERNAL_HPP
#define LOWDIM_LEARNERS_INTERNAL_HPP

#include "lowdim/learners.hpp"

namespace lowdim::detail {

/// Shared precondition for every fit_*: valid config and data, both classes present.
void require_trainable(const Dataset& train, const TrainConfig& config);

nlohmann::json tree_nodes_to_json(const DecisionTree& tree);
DecisionTree tree_from_nodes_json(const nlohmann::json& doc);

} // namespace lowdim::detail

#endif
