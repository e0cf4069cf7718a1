#include "mlp.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace sift {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

struct Activations {
    std::array<double, MlpNetwork::kH1> a1;      // post-ReLU, post-dropout
    std::array<double, MlpNetwork::kH1> mask1;   // dropout multiplier (1 when off)
    std::array<double, MlpNetwork::kH2> a2;
    std::array<double, MlpNetwork::kH3> a3;
    double out = 0.0;
};

// Forward one sample; mask1 == nullptr disables dropout.
void forward_sample(const MlpNetwork& net, std::span<const double> x, const double* mask1,
                    Activations& act) {
    const double* P = net.params.data();
    const double* w1 = P + net.w1();
    const double* b1 = P + net.b1();
    const double* w2 = P + net.w2();
    const double* b2 = P + net.b2();
    const double* w3 = P + net.w3();
    const double* b3 = P + net.b3();
    const double* w4 = P + net.w4();
    const double* b4 = P + net.b4();

    for (int j = 0; j < MlpNetwork::kH1; ++j) {
        double z = b1[j];
        const double* row = w1 + static_cast<size_t>(j) * static_cast<size_t>(net.input_dim);
        for (int c = 0; c < net.input_dim; ++c) z += row[c] * x[static_cast<size_t>(c)];
        double a = z > 0.0 ? z : 0.0;
        double m = mask1 ? mask1[j] : 1.0;
        act.mask1[static_cast<size_t>(j)] = m;
        act.a1[static_cast<size_t>(j)] = a * m;
    }
    for (int k = 0; k < MlpNetwork::kH2; ++k) {
        double z = b2[k];
        const double* row = w2 + static_cast<size_t>(k) * MlpNetwork::kH1;
        for (int j = 0; j < MlpNetwork::kH1; ++j) z += row[j] * act.a1[static_cast<size_t>(j)];
        act.a2[static_cast<size_t>(k)] = z > 0.0 ? z : 0.0;
    }
    for (int l = 0; l < MlpNetwork::kH3; ++l) {
        double z = b3[l];
        const double* row = w3 + static_cast<size_t>(l) * MlpNetwork::kH2;
        for (int k = 0; k < MlpNetwork::kH2; ++k) z += row[k] * act.a2[static_cast<size_t>(k)];
        act.a3[static_cast<size_t>(l)] = z > 0.0 ? z : 0.0;
    }
    double z = b4[0];
    for (int l = 0; l < MlpNetwork::kH3; ++l) z += w4[l] * act.a3[static_cast<size_t>(l)];
    act.out = sigmoid(z);
}

// Backprop one sample's squared-error term, scaled by `scale` (1/batch for
// the mean); accumulates into grad. Returns the sample's squared error.
double backprop_sample(const MlpNetwork& net, std::span<const double> x, int label,
                       const double* mask1, double scale, std::vector<double>& grad) {
    Activations act;
    forward_sample(net, x, mask1, act);
    double y = static_cast<double>(label);
    double err = act.out - y;

    const double* P = net.params.data();
    const double* w2 = P + net.w2();
    const double* w3 = P + net.w3();
    const double* w4 = P + net.w4();
    double* g1 = grad.data() + net.w1();
    double* gb1 = grad.data() + net.b1();
    double* g2 = grad.data() + net.w2();
    double* gb2 = grad.data() + net.b2();
    double* g3 = grad.data() + net.w3();
    double* gb3 = grad.data() + net.b3();
    double* g4 = grad.data() + net.w4();
    double* gb4 = grad.data() + net.b4();

    // d(err^2)/dz4 = 2 err sigma'(z4)
    double dz4 = scale * 2.0 * err * act.out * (1.0 - act.out);
    for (int l = 0; l < MlpNetwork::kH3; ++l) g4[l] += dz4 * act.a3[static_cast<size_t>(l)];
    gb4[0] += dz4;

    std::array<double, MlpNetwork::kH3> dz3;
    for (int l = 0; l < MlpNetwork::kH3; ++l) {
        double da = dz4 * w4[l];
        dz3[static_cast<size_t>(l)] = act.a3[static_cast<size_t>(l)] > 0.0 ? da : 0.0;
    }
    for (int l = 0; l < MlpNetwork::kH3; ++l) {
        double d = dz3[static_cast<size_t>(l)];
        if (d == 0.0) continue;
        double* row = g3 + static_cast<size_t>(l) * MlpNetwork::kH2;
        for (int k = 0; k < MlpNetwork::kH2; ++k) row[k] += d * act.a2[static_cast<size_t>(k)];
        gb3[l] += d;
    }

    std::array<double, MlpNetwork::kH2> dz2;
    for (int k = 0; k < MlpNetwork::kH2; ++k) {
        double da = 0.0;
        for (int l = 0; l < MlpNetwork::kH3; ++l) {
            da += dz3[static_cast<size_t>(l)] * w3[static_cast<size_t>(l) * MlpNetwork::kH2 + k];
        }
        dz2[static_cast<size_t>(k)] = act.a2[static_cast<size_t>(k)] > 0.0 ? da : 0.0;
    }
    for (int k = 0; k < MlpNetwork::kH2; ++k) {
        double d = dz2[static_cast<size_t>(k)];
        if (d == 0.0) continue;
        double* row = g2 + static_cast<size_t>(k) * MlpNetwork::kH1;
        for (int j = 0; j < MlpNetwork::kH1; ++j) row[j] += d * act.a1[static_cast<size_t>(j)];
        gb2[k] += d;
    }

    for (int j = 0; j < MlpNetwork::kH1; ++j) {
        double da = 0.0;
        for (int k = 0; k < MlpNetwork::kH2; ++k) {
            da += dz2[static_cast<size_t>(k)] * w2[static_cast<size_t>(k) * MlpNetwork::kH1 + j];
        }
        // through dropout, then ReLU: a1 = relu(z1) * mask
        da *= act.mask1[static_cast<size_t>(j)];
        double pre = act.mask1[static_cast<size_t>(j)] != 0.0
                         ? act.a1[static_cast<size_t>(j)] / act.mask1[static_cast<size_t>(j)]
                         : 0.0;
        double dz1 = pre > 0.0 ? da : 0.0;
        if (dz1 == 0.0) continue;
        double* row = g1 + static_cast<size_t>(j) * static_cast<size_t>(net.input_dim);
        for (int c = 0; c < net.input_dim; ++c) row[c] += dz1 * x[static_cast<size_t>(c)];
        gb1[j] += dz1;
    }
    return err * err;
}

} // namespace

double MlpNetwork::forward(std::span<const double> x) const {
    Activations act;
    forward_sample(*this, x, nullptr, act);
    return act.out;
}

double mlp_loss(const MlpNetwork& net, const Matrix& x, const std::vector<int>& labels) {
    double sum = 0.0;
    Activations act;
    for (int r = 0; r < x.rows; ++r) {
        forward_sample(net, x.row(r), nullptr, act);
        double err = act.out - static_cast<double>(labels[static_cast<size_t>(r)]);
        sum += err * err;
    }
    return sum / static_cast<double>(x.rows);
}

std::vector<double> mlp_gradient(const MlpNetwork& net, const Matrix& x,
                                 const std::vector<int>& labels) {
    std::vector<double> grad(net.params.size(), 0.0);
    double scale = 1.0 / static_cast<double>(x.rows);
    for (int r = 0; r < x.rows; ++r) {
        backprop_sample(net, x.row(r), labels[static_cast<size_t>(r)], nullptr, scale, grad);
    }
    return grad;
}

std::unique_ptr<MlpModel> MlpModel::train(const ModelSpec& spec, const Matrix& x,
                                          const std::vector<int>& labels) {
    const auto& hp = spec.mlp;
    int n = x.rows;
    MlpNetwork net(x.cols);
    SplitMix64 rng(spec.seed);

    // He-normal weights drawn in layout order, biases stay zero
    auto init_layer = [&](size_t offset, int units, int fan_in) {
        double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
        size_t count = static_cast<size_t>(units) * static_cast<size_t>(fan_in);
        for (size_t i = 0; i < count; ++i) {
            net.params[offset + i] = rng.next_normal() * std_dev;
        }
    };
    init_layer(net.w1(), MlpNetwork::kH1, x.cols);
    init_layer(net.w2(), MlpNetwork::kH2, MlpNetwork::kH1);
    init_layer(net.w3(), MlpNetwork::kH3, MlpNetwork::kH2);
    init_layer(net.w4(), 1, MlpNetwork::kH3);

    std::vector<double> grad(net.params.size());
    std::vector<double> adam_m(net.params.size(), 0.0);
    std::vector<double> adam_v(net.params.size(), 0.0);
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::vector<double> masks; // batch * kH1 dropout multipliers
    double keep = 1.0 - hp.dropout;
    int64_t step = 0;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i) + 1));
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += hp.batch_size) {
            int batch = std::min(hp.batch_size, n - start);
            masks.resize(static_cast<size_t>(batch) * MlpNetwork::kH1);
            for (double& m : masks) {
                m = hp.dropout > 0.0 && rng.next_double() < hp.dropout ? 0.0 : 1.0 / keep;
            }
            std::fill(grad.begin(), grad.end(), 0.0);
            double scale = 1.0 / static_cast<double>(batch);
            double batch_loss = 0.0;
            for (int bi = 0; bi < batch; ++bi) {
                int r = order[static_cast<size_t>(start + bi)];
                batch_loss += backprop_sample(
                    net, x.row(r), labels[static_cast<size_t>(r)],
                    masks.data() + static_cast<size_t>(bi) * MlpNetwork::kH1, scale, grad);
            }
            epoch_loss += batch_loss;

            ++step;
            double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
            for (size_t i = 0; i < net.params.size(); ++i) {
                adam_m[i] = hp.beta1 * adam_m[i] + (1.0 - hp.beta1) * grad[i];
                adam_v[i] = hp.beta2 * adam_v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
                double m_hat = adam_m[i] / bc1;
                double v_hat = adam_v[i] / bc2;
                net.params[i] -= hp.alpha * m_hat / (std::sqrt(v_hat) + hp.epsilon);
            }
        }
        if (!std::isfinite(epoch_loss)) {
            raise(ErrorKind::NonFiniteLoss, "training loss became non-finite");
        }
    }
    return std::unique_ptr<MlpModel>(new MlpModel(spec, std::move(net)));
}

std::unique_ptr<MlpModel> MlpModel::from_params(const ModelSpec& spec, int feature_count,
                                                const nlohmann::json& params) {
    MlpNetwork net(feature_count);
    auto values = params.at("params").get<std::vector<double>>();
    if (values.size() != net.params.size()) {
        raise(ErrorKind::SchemaMismatch, "parameter vector length does not match architecture");
    }
    net.params = std::move(values);
    return std::unique_ptr<MlpModel>(new MlpModel(spec, std::move(net)));
}

double MlpModel::predict_proba_checked(std::span<const double> x) const {
    return net_.forward(x);
}

std::vector<double> MlpModel::feature_importance() const {
    raise(ErrorKind::Unsupported, "feature importance is undefined for the neural network");
}

nlohmann::json MlpModel::params_json() const {
    return nlohmann::json{{"input_dim", net_.input_dim}, {"params", net_.params}};
}

} // namespace sift
