#include "random_forest.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace sift {

namespace {

struct PendingNode {
    int node_id;
    int begin; // range into the bootstrap row array
    int end;
    int depth;
};

double gini(int c0, int c1) {
    double n = static_cast<double>(c0 + c1);
    double p0 = static_cast<double>(c0) / n;
    double p1 = static_cast<double>(c1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

} // namespace

std::unique_ptr<RandomForestModel> RandomForestModel::train(const ModelSpec& spec, const Matrix& x,
                                                            const std::vector<int>& labels) {
    const auto& hp = spec.rf;
    int n = x.rows;
    int p = x.cols;
    int m_try = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));

    std::vector<Tree> trees;
    trees.reserve(static_cast<size_t>(hp.n_trees));
    std::vector<double> importance(static_cast<size_t>(p), 0.0);

    std::vector<int> rows(static_cast<size_t>(n));
    std::vector<int> feature_pool(static_cast<size_t>(p));
    std::vector<std::pair<double, int>> sorted; // (value, label) within a node

    for (int t = 0; t < hp.n_trees; ++t) {
        SplitMix64 rng(derive_seed(spec.seed, static_cast<uint64_t>(t)));
        for (int i = 0; i < n; ++i) {
            rows[static_cast<size_t>(i)] =
                static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        }
        for (int i = 0; i < p; ++i) feature_pool[static_cast<size_t>(i)] = i;

        Tree tree;
        tree.nodes.emplace_back();
        std::vector<PendingNode> stack{{0, 0, n, 0}};
        while (!stack.empty()) {
            PendingNode cur = stack.back();
            stack.pop_back();
            int count = cur.end - cur.begin;
            int c1 = 0;
            for (int i = cur.begin; i < cur.end; ++i) {
                c1 += labels[static_cast<size_t>(rows[static_cast<size_t>(i)])];
            }
            int c0 = count - c1;

            auto make_leaf = [&] {
                // majority vote; a tie votes malicious, matching the 0.5 rule
                tree.nodes[static_cast<size_t>(cur.node_id)].value = c1 >= c0 ? 1.0 : 0.0;
            };
            if (c0 == 0 || c1 == 0 || cur.depth >= hp.max_depth || count < 2 * hp.min_leaf) {
                make_leaf();
                continue;
            }

            // draw the feature subset for this node
            for (int i = 0; i < m_try; ++i) {
                int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(p - i)));
                std::swap(feature_pool[static_cast<size_t>(i)], feature_pool[static_cast<size_t>(j)]);
            }

            double node_gini = gini(c0, c1);
            double best_decrease = 0.0;
            int best_feature = -1;
            double best_threshold = 0.0;
            for (int fi = 0; fi < m_try; ++fi) {
                int f = feature_pool[static_cast<size_t>(fi)];
                sorted.clear();
                for (int i = cur.begin; i < cur.end; ++i) {
                    int r = rows[static_cast<size_t>(i)];
                    sorted.emplace_back(x.at(r, f), labels[static_cast<size_t>(r)]);
                }
                std::sort(sorted.begin(), sorted.end());
                int left1 = 0;
                for (int i = 0; i + 1 < count; ++i) {
                    left1 += sorted[static_cast<size_t>(i)].second;
                    if (sorted[static_cast<size_t>(i)].first ==
                        sorted[static_cast<size_t>(i + 1)].first) {
                        continue;
                    }
                    int nl = i + 1;
                    int nr = count - nl;
                    if (nl < hp.min_leaf || nr < hp.min_leaf) continue;
                    int l0 = nl - left1;
                    int r1 = c1 - left1;
                    int r0 = nr - r1;
                    double weighted = (static_cast<double>(nl) * gini(l0, left1) +
                                       static_cast<double>(nr) * gini(r0, r1)) /
                                      static_cast<double>(count);
                    double decrease = node_gini - weighted;
                    if (decrease > best_decrease) {
                        best_decrease = decrease;
                        best_feature = f;
                        best_threshold = sorted[static_cast<size_t>(i)].first +
                                         (sorted[static_cast<size_t>(i + 1)].first -
                                          sorted[static_cast<size_t>(i)].first) /
                                             2.0;
                    }
                }
            }
            if (best_feature < 0) {
                make_leaf();
                continue;
            }

            auto mid_it = std::partition(rows.begin() + cur.begin, rows.begin() + cur.end,
                                         [&](int r) { return x.at(r, best_feature) <= best_threshold; });
            int mid = static_cast<int>(mid_it - rows.begin());
            if (mid == cur.begin || mid == cur.end) {
                // midpoint of two adjacent doubles can collapse onto an
                // endpoint; treat as unsplittable
                make_leaf();
                continue;
            }

            importance[static_cast<size_t>(best_feature)] +=
                best_decrease * static_cast<double>(count) / static_cast<double>(n);

            int left_id = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            int right_id = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[static_cast<size_t>(cur.node_id)];
            node.feature = best_feature;
            node.threshold = best_threshold;
            node.left = left_id;
            node.right = right_id;
            stack.push_back({right_id, mid, cur.end, cur.depth + 1});
            stack.push_back({left_id, cur.begin, mid, cur.depth + 1});
        }
        trees.push_back(std::move(tree));
    }

    for (double& v : importance) v /= static_cast<double>(hp.n_trees);
    return std::unique_ptr<RandomForestModel>(
        new RandomForestModel(spec, p, std::move(trees), std::move(importance)));
}

std::unique_ptr<RandomForestModel> RandomForestModel::from_params(const ModelSpec& spec,
                                                                  int feature_count,
                                                                  const nlohmann::json& params) {
    std::vector<Tree> trees;
    for (const auto& jt : params.at("trees")) {
        trees.push_back(tree_from_json(jt));
    }
    if (trees.empty()) {
        raise(ErrorKind::SchemaMismatch, "forest artifact has no trees");
    }
    auto importance = params.at("importance_raw").get<std::vector<double>>();
    if (importance.size() != static_cast<size_t>(feature_count)) {
        raise(ErrorKind::SchemaMismatch, "importance length does not match feature count");
    }
    return std::unique_ptr<RandomForestModel>(
        new RandomForestModel(spec, feature_count, std::move(trees), std::move(importance)));
}

double RandomForestModel::predict_proba_checked(std::span<const double> x) const {
    double votes = 0.0;
    for (const auto& tree : trees_) {
        votes += tree.predict(x);
    }
    return votes / static_cast<double>(trees_.size());
}

std::vector<double> RandomForestModel::feature_importance() const {
    return normalize_importance(importance_raw_);
}

nlohmann::json RandomForestModel::params_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        trees.push_back(tree_to_json(tree));
    }
    return nlohmann::json{{"trees", trees}, {"importance_raw", importance_raw_}};
}

} // namespace sift
