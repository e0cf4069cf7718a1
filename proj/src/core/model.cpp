#include "model.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "gbt.hpp"
#include "logreg.hpp"
#include "mlp.hpp"
#include "random_forest.hpp"
#include "svm.hpp"

namespace sift {

const char* to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::Logreg: return "logreg";
        case ModelFamily::RandomForest: return "rf";
        case ModelFamily::Gbt: return "gbt";
        case ModelFamily::SvmRbf: return "svm";
        case ModelFamily::Mlp: return "mlp";
    }
    return "?";
}

ModelFamily parse_model_family(const std::string& name) {
    if (name == "logreg") return ModelFamily::Logreg;
    if (name == "rf") return ModelFamily::RandomForest;
    if (name == "gbt") return ModelFamily::Gbt;
    if (name == "svm") return ModelFamily::SvmRbf;
    if (name == "mlp") return ModelFamily::Mlp;
    raise(ErrorKind::InvalidConfig, "unknown model family '" + name + "'");
}

bool normalize_default(ModelFamily family) {
    switch (family) {
        case ModelFamily::Logreg:
        case ModelFamily::SvmRbf:
        case ModelFamily::Mlp:
            return true;
        case ModelFamily::RandomForest:
        case ModelFamily::Gbt:
            return false;
    }
    return false;
}

void ModelSpec::validate() const {
    auto bad = [](const std::string& msg) { raise(ErrorKind::InvalidConfig, msg); };
    switch (family) {
        case ModelFamily::Logreg:
            if (logreg.lambda < 0.0) bad("logreg lambda must be >= 0");
            if (logreg.max_iters < 0) bad("logreg max_iters must be >= 0");
            if (logreg.grad_tol <= 0.0) bad("logreg grad_tol must be > 0");
            break;
        case ModelFamily::RandomForest:
            if (rf.n_trees < 1) bad("rf n_trees must be >= 1");
            if (rf.max_depth < 1) bad("rf max_depth must be >= 1");
            if (rf.min_leaf < 1) bad("rf min_leaf must be >= 1");
            break;
        case ModelFamily::Gbt:
            if (gbt.rounds < 0) bad("gbt rounds must be >= 0");
            if (gbt.max_depth < 1) bad("gbt max_depth must be >= 1");
            if (gbt.eta <= 0.0 || gbt.eta > 1.0) bad("gbt eta must be in (0, 1]");
            if (gbt.lambda < 0.0) bad("gbt lambda must be >= 0");
            if (gbt.gamma < 0.0) bad("gbt gamma must be >= 0");
            break;
        case ModelFamily::SvmRbf:
            if (svm.c <= 0.0) bad("svm C must be > 0");
            if (svm.gamma < 0.0) bad("svm gamma must be >= 0");
            if (svm.tol <= 0.0) bad("svm tol must be > 0");
            if (svm.max_epochs < 1) bad("svm max_epochs must be >= 1");
            break;
        case ModelFamily::Mlp:
            if (mlp.dropout < 0.0 || mlp.dropout >= 1.0) bad("mlp dropout must be in [0, 1)");
            if (mlp.alpha <= 0.0) bad("mlp alpha must be > 0");
            if (mlp.beta1 <= 0.0 || mlp.beta1 >= 1.0) bad("mlp beta1 must be in (0, 1)");
            if (mlp.beta2 <= 0.0 || mlp.beta2 >= 1.0) bad("mlp beta2 must be in (0, 1)");
            if (mlp.epsilon <= 0.0) bad("mlp epsilon must be > 0");
            if (mlp.epochs < 1) bad("mlp epochs must be >= 1");
            if (mlp.batch_size < 1) bad("mlp batch_size must be >= 1");
            break;
    }
}

nlohmann::json spec_to_json(const ModelSpec& spec) {
    nlohmann::json h;
    switch (spec.family) {
        case ModelFamily::Logreg:
            h = {{"lambda", spec.logreg.lambda},
                 {"max_iters", spec.logreg.max_iters},
                 {"grad_tol", spec.logreg.grad_tol}};
            break;
        case ModelFamily::RandomForest:
            h = {{"n_trees", spec.rf.n_trees},
                 {"max_depth", spec.rf.max_depth},
                 {"min_leaf", spec.rf.min_leaf}};
            break;
        case ModelFamily::Gbt:
            h = {{"rounds", spec.gbt.rounds},
                 {"max_depth", spec.gbt.max_depth},
                 {"eta", spec.gbt.eta},
                 {"lambda", spec.gbt.lambda},
                 {"gamma", spec.gbt.gamma}};
            break;
        case ModelFamily::SvmRbf:
            h = {{"c", spec.svm.c},
                 {"gamma", spec.svm.gamma},
                 {"tol", spec.svm.tol},
                 {"max_epochs", spec.svm.max_epochs}};
            break;
        case ModelFamily::Mlp:
            h = {{"dropout", spec.mlp.dropout},
                 {"alpha", spec.mlp.alpha},
                 {"beta1", spec.mlp.beta1},
                 {"beta2", spec.mlp.beta2},
                 {"epsilon", spec.mlp.epsilon},
                 {"epochs", spec.mlp.epochs},
                 {"batch_size", spec.mlp.batch_size}};
            break;
    }
    return nlohmann::json{{"family", to_string(spec.family)},
                          {"seed", spec.seed},
                          {"normalize", spec.normalize},
                          {"hyperparams", h}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec spec;
    spec.family = parse_model_family(j.at("family").get<std::string>());
    spec.seed = j.at("seed").get<uint64_t>();
    spec.normalize = j.at("normalize").get<bool>();
    const auto& h = j.at("hyperparams");
    switch (spec.family) {
        case ModelFamily::Logreg:
            spec.logreg.lambda = h.at("lambda").get<double>();
            spec.logreg.max_iters = h.at("max_iters").get<int>();
            spec.logreg.grad_tol = h.at("grad_tol").get<double>();
            break;
        case ModelFamily::RandomForest:
            spec.rf.n_trees = h.at("n_trees").get<int>();
            spec.rf.max_depth = h.at("max_depth").get<int>();
            spec.rf.min_leaf = h.at("min_leaf").get<int>();
            break;
        case ModelFamily::Gbt:
            spec.gbt.rounds = h.at("rounds").get<int>();
            spec.gbt.max_depth = h.at("max_depth").get<int>();
            spec.gbt.eta = h.at("eta").get<double>();
            spec.gbt.lambda = h.at("lambda").get<double>();
            spec.gbt.gamma = h.at("gamma").get<double>();
            break;
        case ModelFamily::SvmRbf:
            spec.svm.c = h.at("c").get<double>();
            spec.svm.gamma = h.at("gamma").get<double>();
            spec.svm.tol = h.at("tol").get<double>();
            spec.svm.max_epochs = h.at("max_epochs").get<int>();
            break;
        case ModelFamily::Mlp:
            spec.mlp.dropout = h.at("dropout").get<double>();
            spec.mlp.alpha = h.at("alpha").get<double>();
            spec.mlp.beta1 = h.at("beta1").get<double>();
            spec.mlp.beta2 = h.at("beta2").get<double>();
            spec.mlp.epsilon = h.at("epsilon").get<double>();
            spec.mlp.epochs = h.at("epochs").get<int>();
            spec.mlp.batch_size = h.at("batch_size").get<int>();
            break;
    }
    spec.validate();
    return spec;
}

double Model::predict_proba(std::span<const double> x) const {
    if (x.size() != static_cast<size_t>(feature_count_)) {
        raise(ErrorKind::DimensionMismatch,
              "expected " + std::to_string(feature_count_) + " features, got " +
                  std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            raise(ErrorKind::DimensionMismatch, "input vector has non-finite entries");
        }
    }
    return predict_proba_checked(x);
}

std::vector<double> normalize_importance(std::vector<double> raw) {
    double sum = 0.0;
    for (double v : raw) sum += v;
    if (sum <= 0.0) {
        double u = raw.empty() ? 0.0 : 1.0 / static_cast<double>(raw.size());
        std::fill(raw.begin(), raw.end(), u);
        return raw;
    }
    for (double& v : raw) v /= sum;
    return raw;
}

void require_both_classes(const std::vector<int>& labels) {
    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y == 0) has0 = true;
        else if (y == 1) has1 = true;
        else raise(ErrorKind::InvalidConfig, "labels must be 0 or 1");
    }
    if (!has0 || !has1) {
        raise(ErrorKind::SingleClassTrainingSet, "training set must contain both classes");
    }
}

std::unique_ptr<Model> train_model(const ModelSpec& spec, const Matrix& x,
                                   const std::vector<int>& labels) {
    spec.validate();
    if (labels.size() != static_cast<size_t>(x.rows)) {
        raise(ErrorKind::DimensionMismatch, "label count does not match row count");
    }
    if (x.rows == 0 || x.cols == 0) {
        raise(ErrorKind::TooFewRows, "training matrix is empty");
    }
    require_both_classes(labels);
    for (double v : x.data) {
        if (!std::isfinite(v)) {
            raise(ErrorKind::InvalidConfig, "training matrix has non-finite entries");
        }
    }
    switch (spec.family) {
        case ModelFamily::Logreg: return LogregModel::train(spec, x, labels);
        case ModelFamily::RandomForest: return RandomForestModel::train(spec, x, labels);
        case ModelFamily::Gbt: return GbtModel::train(spec, x, labels);
        case ModelFamily::SvmRbf: return SvmModel::train(spec, x, labels);
        case ModelFamily::Mlp: return MlpModel::train(spec, x, labels);
    }
    raise(ErrorKind::InvalidConfig, "unknown model family");
}

std::unique_ptr<Model> model_from_params(const ModelSpec& spec, int feature_count,
                                         const nlohmann::json& params) {
    spec.validate();
    switch (spec.family) {
        case ModelFamily::Logreg: return LogregModel::from_params(spec, feature_count, params);
        case ModelFamily::RandomForest:
            return RandomForestModel::from_params(spec, feature_count, params);
        case ModelFamily::Gbt: return GbtModel::from_params(spec, feature_count, params);
        case ModelFamily::SvmRbf: return SvmModel::from_params(spec, feature_count, params);
        case ModelFamily::Mlp: return MlpModel::from_params(spec, feature_count, params);
    }
    raise(ErrorKind::InvalidConfig, "unknown model family");
}

} // namespace sift
