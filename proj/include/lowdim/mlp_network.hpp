#ifndef LOWDIM_MLP_NETWORK_HPP
#define LOWDIM_MLP_NETWORK_HPP

#include "lowdim/matrix.hpp"
#include "lowdim/random.hpp"
#include "lowdim/training.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lowdim {

/// Fully connected layer, weights stored out x in row-major.
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;
};

/// ReLU hidden layers followed by a 2-way softmax output layer.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<DenseLayer> layers);

    /// He-uniform initialisation, zero biases.
    static Network random(std::size_t n_inputs, std::size_t hidden_layers, std::size_t hidden_units, Rng& rng);

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::size_t n_inputs() const { return layers_.empty() ? 0 : layers_.front().inputs; }

    std::size_t parameter_count() const;
    /// Layer by layer: weights then bias.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    /// Softmax (P0, P1) for an already standardised row.
    std::array<double, 2> forward(std::span<const double> x) const;

private:
    std::vector<DenseLayer> layers_;
};

/// Weighted cross-entropy (1/m) sum_i w(y_i) * -ln P_{y_i}(x_i) over `rows`.
/// When `gradient` is non-null it receives d loss / d parameters in the
/// Network::parameters() layout. With `dropout_rng` set, inverted dropout at
/// `dropout_rate` is applied to the outputs of every hidden layer that feeds
/// another hidden layer.
double cross_entropy(const Network& net, const Matrix& x, std::span<const int> y,
                     std::span<const std::size_t> rows, const ClassWeights& weights,
                     std::vector<double>* gradient = nullptr, Rng* dropout_rng = nullptr,
                     double dropout_rate = 0.0);

} // namespace lowdim

#endif
