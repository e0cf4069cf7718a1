#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace sift {

// Binary decision tree shared by the forest and the boosting ensemble.
// feature == -1 marks a leaf; interior nodes route x[feature] <= threshold
// to the left child.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf payload: class vote or boosting weight
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(std::span<const double> x) const {
        int id = 0;
        while (nodes[static_cast<size_t>(id)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<size_t>(id)];
            id = x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<size_t>(id)].value;
    }
};

nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j);

} // namespace sift
