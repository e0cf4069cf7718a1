#include "gbt.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace sift {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

struct BuildNode {
    int tree_node = 0;
    double g_sum = 0.0;
    double h_sum = 0.0;
    int count = 0;
    // best split over the level's feature sweep
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    // running prefix while scanning one feature
    double run_g = 0.0;
    double run_h = 0.0;
    int run_count = 0;
    double prev_value = 0.0;
};

} // namespace

std::unique_ptr<GbtModel> GbtModel::train(const ModelSpec& spec, const Matrix& x,
                                          const std::vector<int>& labels) {
    const auto& hp = spec.gbt;
    int n = x.rows;
    int p = x.cols;
    double lambda = hp.lambda;

    double mean_y = 0.0;
    for (int y : labels) mean_y += static_cast<double>(y);
    mean_y /= static_cast<double>(n);
    double base_score = std::log(mean_y / (1.0 - mean_y));
    if (!std::isfinite(base_score)) {
        raise(ErrorKind::NonFiniteLoss, "prior log-odds are non-finite");
    }

    // column blocks: each feature's (value, row) pairs sorted once up front
    std::vector<std::vector<std::pair<double, int>>> columns(static_cast<size_t>(p));
    for (int c = 0; c < p; ++c) {
        auto& col = columns[static_cast<size_t>(c)];
        col.reserve(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
            col.emplace_back(x.at(r, c), r);
        }
        std::sort(col.begin(), col.end());
    }

    std::vector<double> margin(static_cast<size_t>(n), base_score);
    std::vector<double> g(static_cast<size_t>(n));
    std::vector<double> h(static_cast<size_t>(n));
    std::vector<int> node_of(static_cast<size_t>(n)); // index into the active level, -1 = settled
    std::vector<Tree> trees;
    trees.reserve(static_cast<size_t>(hp.rounds));
    std::vector<double> importance(static_cast<size_t>(p), 0.0);

    auto leaf_value = [&](const BuildNode& node) {
        double w = -node.g_sum / (node.h_sum + lambda);
        if (!std::isfinite(w)) {
            raise(ErrorKind::NonFiniteLoss, "leaf weight is non-finite");
        }
        return hp.eta * w;
    };

    for (int round = 0; round < hp.rounds; ++round) {
        for (int r = 0; r < n; ++r) {
            double prob = sigmoid(margin[static_cast<size_t>(r)]);
            g[static_cast<size_t>(r)] = prob - static_cast<double>(labels[static_cast<size_t>(r)]);
            h[static_cast<size_t>(r)] = prob * (1.0 - prob);
        }

        Tree tree;
        tree.nodes.emplace_back();
        std::vector<BuildNode> active(1);
        active[0].tree_node = 0;
        active[0].count = n;
        for (int r = 0; r < n; ++r) {
            active[0].g_sum += g[static_cast<size_t>(r)];
            active[0].h_sum += h[static_cast<size_t>(r)];
        }
        std::fill(node_of.begin(), node_of.end(), 0);

        for (int depth = 0; depth < hp.max_depth && !active.empty(); ++depth) {
            for (auto& node : active) {
                node.best_gain = 0.0;
                node.best_feature = -1;
            }
            for (int f = 0; f < p; ++f) {
                for (auto& node : active) {
                    node.run_g = 0.0;
                    node.run_h = 0.0;
                    node.run_count = 0;
                }
                for (const auto& [value, row] : columns[static_cast<size_t>(f)]) {
                    int b = node_of[static_cast<size_t>(row)];
                    if (b < 0) continue;
                    BuildNode& node = active[static_cast<size_t>(b)];
                    if (node.run_count > 0 && value != node.prev_value &&
                        node.run_count < node.count) {
                        double gl = node.run_g;
                        double hl = node.run_h;
                        double gr = node.g_sum - gl;
                        double hr = node.h_sum - hl;
                        double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                                             node.g_sum * node.g_sum / (node.h_sum + lambda)) -
                                      hp.gamma;
                        if (gain > node.best_gain) {
                            double threshold =
                                node.prev_value + (value - node.prev_value) / 2.0;
                            // keep routing identical to the scan prefix when the
                            // midpoint rounds up onto the right-hand value
                            if (!(threshold < value)) threshold = node.prev_value;
                            node.best_gain = gain;
                            node.best_feature = f;
                            node.best_threshold = threshold;
                        }
                    }
                    node.run_g += g[static_cast<size_t>(row)];
                    node.run_h += h[static_cast<size_t>(row)];
                    node.run_count += 1;
                    node.prev_value = value;
                }
            }

            // materialize the level: split the winners, settle the rest
            std::vector<BuildNode> next;
            std::vector<int> child_base(active.size(), -1);
            for (size_t b = 0; b < active.size(); ++b) {
                BuildNode& node = active[b];
                if (node.best_feature < 0) {
                    tree.nodes[static_cast<size_t>(node.tree_node)].value = leaf_value(node);
                    continue;
                }
                importance[static_cast<size_t>(node.best_feature)] += node.best_gain;
                int left_id = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                int right_id = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                TreeNode& tn = tree.nodes[static_cast<size_t>(node.tree_node)];
                tn.feature = node.best_feature;
                tn.threshold = node.best_threshold;
                tn.left = left_id;
                tn.right = right_id;
                child_base[b] = static_cast<int>(next.size());
                BuildNode left, right;
                left.tree_node = left_id;
                right.tree_node = right_id;
                next.push_back(left);
                next.push_back(right);
            }
            for (int r = 0; r < n; ++r) {
                int b = node_of[static_cast<size_t>(r)];
                if (b < 0) continue;
                const BuildNode& node = active[static_cast<size_t>(b)];
                if (child_base[static_cast<size_t>(b)] < 0) {
                    node_of[static_cast<size_t>(r)] = -1;
                    continue;
                }
                bool goes_left = x.at(r, node.best_feature) <= node.best_threshold;
                int child = child_base[static_cast<size_t>(b)] + (goes_left ? 0 : 1);
                BuildNode& cn = next[static_cast<size_t>(child)];
                cn.g_sum += g[static_cast<size_t>(r)];
                cn.h_sum += h[static_cast<size_t>(r)];
                cn.count += 1;
                node_of[static_cast<size_t>(r)] = child;
            }
            active = std::move(next);
        }
        for (const auto& node : active) {
            tree.nodes[static_cast<size_t>(node.tree_node)].value = leaf_value(node);
        }

        for (int r = 0; r < n; ++r) {
            margin[static_cast<size_t>(r)] += tree.predict(x.row(r));
        }
        trees.push_back(std::move(tree));
    }

    return std::unique_ptr<GbtModel>(
        new GbtModel(spec, p, base_score, std::move(trees), std::move(importance)));
}

std::unique_ptr<GbtModel> GbtModel::from_params(const ModelSpec& spec, int feature_count,
                                                const nlohmann::json& params) {
    double base_score = params.at("base_score").get<double>();
    std::vector<Tree> trees;
    for (const auto& jt : params.at("trees")) {
        trees.push_back(tree_from_json(jt));
    }
    auto importance = params.at("importance_raw").get<std::vector<double>>();
    if (importance.size() != static_cast<size_t>(feature_count)) {
        raise(ErrorKind::SchemaMismatch, "importance length does not match feature count");
    }
    return std::unique_ptr<GbtModel>(
        new GbtModel(spec, feature_count, base_score, std::move(trees), std::move(importance)));
}

double GbtModel::decision_value(std::span<const double> x) const {
    double sum = base_score_;
    for (const auto& tree : trees_) {
        sum += tree.predict(x);
    }
    return sum;
}

double GbtModel::predict_proba_checked(std::span<const double> x) const {
    return sigmoid(decision_value(x));
}

std::vector<double> GbtModel::feature_importance() const {
    return normalize_importance(importance_raw_);
}

nlohmann::json GbtModel::params_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        trees.push_back(tree_to_json(tree));
    }
    return nlohmann::json{
        {"base_score", base_score_}, {"trees", trees}, {"importance_raw", importance_raw_}};
}

} // namespace sift
