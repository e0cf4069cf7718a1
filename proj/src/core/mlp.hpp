#pragma once

#include "model.hpp"

namespace sift {

// 40-ReLU -> dropout -> 10-ReLU -> 5-ReLU -> 1-sigmoid, parameters in one
// flat vector so gradients can be checked against finite differences.
struct MlpNetwork {
    static constexpr int kH1 = 40;
    static constexpr int kH2 = 10;
    static constexpr int kH3 = 5;

    int input_dim = 0;
    std::vector<double> params;

    explicit MlpNetwork(int input_dim_ = 0) : input_dim(input_dim_) {
        params.assign(param_count(input_dim_), 0.0);
    }

    static size_t param_count(int input_dim) {
        return static_cast<size_t>(input_dim) * kH1 + kH1 + kH1 * kH2 + kH2 + kH2 * kH3 + kH3 +
               kH3 + 1;
    }

    // flat layout: W1 | b1 | W2 | b2 | W3 | b3 | W4 | b4, weights row-major
    // (one row per output unit)
    size_t w1() const { return 0; }
    size_t b1() const { return w1() + static_cast<size_t>(input_dim) * kH1; }
    size_t w2() const { return b1() + kH1; }
    size_t b2() const { return w2() + static_cast<size_t>(kH1) * kH2; }
    size_t w3() const { return b2() + kH2; }
    size_t b3() const { return w3() + static_cast<size_t>(kH2) * kH3; }
    size_t w4() const { return b3() + kH3; }
    size_t b4() const { return w4() + kH3; }

    // inference forward pass (no dropout; inverted scaling during training
    // means no rescaling here)
    double forward(std::span<const double> x) const;
};

// Mean squared error over all rows, dropout off.
double mlp_loss(const MlpNetwork& net, const Matrix& x, const std::vector<int>& labels);

// Analytic gradient of mlp_loss, same flat layout as params.
std::vector<double> mlp_gradient(const MlpNetwork& net, const Matrix& x,
                                 const std::vector<int>& labels);

class MlpModel : public Model {
public:
    static std::unique_ptr<MlpModel> train(const ModelSpec& spec, const Matrix& x,
                                           const std::vector<int>& labels);
    static std::unique_ptr<MlpModel> from_params(const ModelSpec& spec, int feature_count,
                                                 const nlohmann::json& params);

    std::vector<double> feature_importance() const override; // Unsupported
    nlohmann::json params_json() const override;
    const MlpNetwork& network() const { return net_; }

protected:
    double predict_proba_checked(std::span<const double> x) const override;

private:
    MlpModel(const ModelSpec& spec, MlpNetwork net) : Model(spec, net.input_dim), net_(std::move(net)) {}

    MlpNetwork net_;
};

} // namespace sift
