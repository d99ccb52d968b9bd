#include "internal.hpp"

#include "lowdim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lowdim {

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2) throw Error("network needs at least one hidden layer and an output layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs ||
            layer.inputs == 0) {
            throw Error("network layer " + std::to_string(l) + " has inconsistent shapes");
        }
        if (l > 0 && layer.inputs != layers_[l - 1].outputs) throw Error("network layers do not chain");
    }
    if (layers_.back().outputs != 2) throw Error("network output layer must have 2 units");
}

Network Network::random(std::size_t n_inputs, std::size_t hidden_layers, std::size_t hidden_units, Rng& rng) {
    std::vector<DenseLayer> layers;
    std::size_t inputs = n_inputs;
    for (std::size_t l = 0; l <= hidden_layers; ++l) {
        const bool output = l == hidden_layers;
        DenseLayer layer;
        layer.inputs = inputs;
        layer.outputs = output ? 2 : hidden_units;
        // He-uniform for ReLU layers, Glorot-uniform for the softmax layer.
        const double limit = output ? std::sqrt(6.0 / double(layer.inputs + layer.outputs))
                                    : std::sqrt(6.0 / double(layer.inputs));
        std::uniform_real_distribution<double> init(-limit, limit);
        layer.weights.resize(layer.inputs * layer.outputs);
        for (auto& w : layer.weights) w = init(rng);
        layer.bias.assign(layer.outputs, 0.0);
        inputs = layer.outputs;
        layers.push_back(std::move(layer));
    }
    return Network(std::move(layers));
}

std::size_t Network::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers_) count += layer.weights.size() + layer.bias.size();
    return count;
}

std::vector<double> Network::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& layer : layers_) {
        flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
        flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
    }
    return flat;
}

void Network::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw Error("parameter vector has the wrong length");
    std::size_t at = 0;
    for (auto& layer : layers_) {
        std::copy_n(flat.begin() + static_cast<long>(at), layer.weights.size(), layer.weights.begin());
        at += layer.weights.size();
        std::copy_n(flat.begin() + static_cast<long>(at), layer.bias.size(), layer.bias.begin());
        at += layer.bias.size();
    }
}

namespace {

void affine(const DenseLayer& layer, std::span<const double> in, std::span<double> out) {
    for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* w = layer.weights.data() + o * layer.inputs;
        double acc = layer.bias[o];
        for (std::size_t i = 0; i < layer.inputs; ++i) acc += w[i] * in[i];
        out[o] = acc;
    }
}

std::array<double, 2> softmax(double z0, double z1) {
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m);
    const double e1 = std::exp(z1 - m);
    const double s = e0 + e1;
    return {e0 / s, e1 / s};
}

// -ln softmax(z)[label], computed without forming the probability.
double neg_log_prob(double z0, double z1, int label) {
    const double m = std::max(z0, z1);
    const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
    return lse - (label == 1 ? z1 : z0);
}

} // namespace

std::array<double, 2> Network::forward(std::span<const double> x) const {
    std::vector<double> in(x.begin(), x.end()), out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        out.assign(layers_[l].outputs, 0.0);
        affine(layers_[l], in, out);
        if (l + 1 < layers_.size()) {
            for (auto& v : out) v = std::max(0.0, v);
        }
        in.swap(out);
    }
    return softmax(in[0], in[1]);
}

double cross_entropy(const Network& net, const Matrix& x, std::span<const int> y,
                     std::span<const std::size_t> rows, const ClassWeights& weights, std::vector<double>* gradient,
                     Rng* dropout_rng, double dropout_rate) {
    const auto& layers = net.layers();
    const std::size_t n_layers = layers.size();
    const std::size_t n_hidden = n_layers - 1;
    if (x.cols() != net.n_inputs()) throw Error("network input width does not match data");
    if (rows.empty()) throw Error("cross entropy over an empty batch");

    if (gradient) gradient->assign(net.parameter_count(), 0.0);
    std::vector<std::size_t> offsets(n_layers);
    for (std::size_t l = 0, at = 0; l < n_layers; ++l) {
        offsets[l] = at;
        at += layers[l].weights.size() + layers[l].bias.size();
    }

    const bool dropout = dropout_rng != nullptr && dropout_rate > 0.0;
    const double keep_scale = dropout ? 1.0 / (1.0 - dropout_rate) : 1.0;
    std::bernoulli_distribution keep(1.0 - dropout_rate);

    // acts[0] is the input; acts[l+1] is the (post-ReLU, post-dropout) output of layer l.
    std::vector<std::vector<double>> acts(n_layers + 1);
    // mult[l] is d acts[l+1] / d pre-activation for hidden layer l (ReLU gate times dropout scale).
    std::vector<std::vector<double>> mult(n_hidden);
    std::vector<double> delta, prev_delta;

    const double inv_m = 1.0 / static_cast<double>(rows.size());
    double total = 0.0;

    for (std::size_t r : rows) {
        const auto input = x.row(r);
        acts[0].assign(input.begin(), input.end());
        for (std::size_t l = 0; l < n_layers; ++l) {
            acts[l + 1].assign(layers[l].outputs, 0.0);
            affine(layers[l], acts[l], acts[l + 1]);
            if (l < n_hidden) {
                mult[l].assign(layers[l].outputs, 0.0);
                const bool drop_here = dropout && l + 1 < n_hidden;
                for (std::size_t u = 0; u < layers[l].outputs; ++u) {
                    double gate = acts[l + 1][u] > 0.0 ? 1.0 : 0.0;
                    if (drop_here) gate *= keep(*dropout_rng) ? keep_scale : 0.0;
                    mult[l][u] = gate;
                    acts[l + 1][u] *= gate;
                }
            }
        }
        const auto& logits = acts[n_layers];
        const int label = y[r];
        const double w = weights.of(label);
        total += w * neg_log_prob(logits[0], logits[1], label);
        if (!gradient) continue;

        const auto p = softmax(logits[0], logits[1]);
        delta = {w * (p[0] - (label == 0 ? 1.0 : 0.0)) * inv_m, w * (p[1] - (label == 1 ? 1.0 : 0.0)) * inv_m};
        for (std::size_t l = n_layers; l-- > 0;) {
            const auto& layer = layers[l];
            double* gw = gradient->data() + offsets[l];
            double* gb = gw + layer.weights.size();
            const auto& in = acts[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                double* row = gw + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i) row[i] += d * in[i];
                gb[o] += d;
            }
            if (l == 0) break;
            prev_delta.assign(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* wrow = layer.weights.data() + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i) prev_delta[i] += wrow[i] * d;
            }
            for (std::size_t i = 0; i < layer.inputs; ++i) prev_delta[i] *= mult[l - 1][i];
            delta.swap(prev_delta);
        }
    }
    return total * inv_m;
}

Mlp::Mlp(Standardizer input, Network network, std::vector<double> loss_log)
    : input_(std::move(input)), network_(std::move(network)) {
    if (input_.means.size() != network_.n_inputs() || input_.scales.size() != input_.means.size()) {
        throw Error("MLP standardizer does not match network input width");
    }
    training_log_ = std::move(loss_log);
}

std::array<double, 2> Mlp::probabilities(std::span<const double> x) const {
    std::vector<double> z(x.size());
    input_.apply(x, z);
    return network_.forward(z);
}

double Mlp::score_row(std::span<const double> x) const { return probabilities(x)[1]; }

namespace {

class Adam {
public:
    Adam(std::size_t size, double rate) : rate_(rate), m_(size, 0.0), v_(size, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1 * m_[i] + (1.0 - beta1) * grad[i];
            v_[i] = beta2 * v_[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= rate_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + epsilon);
        }
    }

private:
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

    double rate_;
    std::uint64_t t_ = 0;
    std::vector<double> m_, v_;
};

} // namespace

std::unique_ptr<Mlp> fit_mlp(const Dataset& train, const TrainConfig& config) {
    detail::require_trainable(train, config);
    const auto& p = config.mlp;
    const std::size_t n = train.size();
    const Standardizer scaler =
        p.standardize ? Standardizer::fit(train.features) : Standardizer::identity(train.n_features());
    const Matrix x = scaler.apply(train.features);
    const ClassWeights cw = class_weights(train.labels, config.class_weighted);

    Rng init_rng(derive_seed(config.seed, 0));
    Rng order_rng(derive_seed(config.seed, 1));
    Rng dropout_rng(derive_seed(config.seed, 2));
    Network net = Network::random(train.n_features(), p.hidden_layers, p.hidden_units, init_rng);

    std::vector<double> params = net.parameters();
    std::vector<double> best_params = params;
    std::vector<double> grad;
    Adam adam(params.size(), p.learning_rate);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> log;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), order_rng);
        for (std::size_t start = 0; start < n; start += p.batch_size) {
            const std::size_t stop = std::min(n, start + p.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            cross_entropy(net, x, train.labels, batch, cw, &grad, &dropout_rng, p.dropout);
            adam.step(params, grad);
            net.set_parameters(params);
        }
        const double loss = cross_entropy(net, x, train.labels, order, cw);
        if (!std::isfinite(loss)) throw Error("MLP loss became non-finite at epoch " + std::to_string(epoch));
        log.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best_epoch = epoch;
            best_params = params;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }
    net.set_parameters(best_params);
    return std::make_unique<Mlp>(scaler, std::move(net), std::move(log));
}

} // namespace lowdim
