#include "tree.hpp"

#include "errors.hpp"

namespace sift {

nlohmann::json tree_to_json(const Tree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value}});
    }
    return nodes;
}

Tree tree_from_json(const nlohmann::json& j) {
    Tree tree;
    if (!j.is_array() || j.empty()) {
        raise(ErrorKind::SchemaMismatch, "tree must be a non-empty node array");
    }
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.value = n.at("value").get<double>();
        tree.nodes.push_back(node);
    }
    int count = static_cast<int>(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        if (n.feature >= 0 && (n.left < 0 || n.left >= count || n.right < 0 || n.right >= count)) {
            raise(ErrorKind::SchemaMismatch, "tree node has out-of-range children");
        }
    }
    return tree;
}

} // namespace sift
