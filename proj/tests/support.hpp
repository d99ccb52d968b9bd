#ifndef LOWDIM_TEST_SUPPORT_HPP
#define LOWDIM_TEST_SUPPORT_HPP

#include "lowdim/dataset.hpp"
#include "lowdim/mlp_network.hpp"
#include "lowdim/random.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace lowdim::testing {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lowdim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Two 2-D Gaussian blobs (negatives at the origin, positives at (6, 6), unit
/// spread). Points closer than 1 to the line x + y = 6, or on the wrong side
/// of it, are redrawn, so the hyperplane x + y = 6 separates the classes with
/// margin >= 1.
inline Dataset separable_blobs(std::size_t n, std::size_t n_positive, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(n, 2);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < n_positive ? 1 : 0;
        const double centre = label == 1 ? 6.0 : 0.0;
        double a = 0.0, b = 0.0;
        for (;;) {
            a = centre + gauss(rng);
            b = centre + gauss(rng);
            const double signed_gap = (a + b - 6.0) / std::sqrt(2.0);
            if ((label == 1 ? signed_gap : -signed_gap) >= 1.0) break;
        }
        x(i, 0) = a;
        x(i, 1) = b;
        y[i] = label;
    }
    return shuffle(make_dataset(std::move(x), std::move(y), {"a", "b"}, "blobs"), seed + 1);
}

/// Uniform random features in [lo, hi) with Bernoulli(p) labels (at least one of each class when n >= 2).
inline Dataset random_dataset(std::size_t n, std::size_t f, std::uint64_t seed, double p = 0.3, double lo = 0.0,
                              double hi = 1.0) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(lo, hi);
    std::bernoulli_distribution coin(p);
    Matrix x(n, f);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < f; ++c) x(r, c) = unit(rng);
        y[r] = coin(rng) ? 1 : 0;
    }
    if (n >= 2) {
        y[0] = 1;
        y[1] = 0;
    }
    return make_dataset(std::move(x), std::move(y));
}

/// Largest relative gap between the analytic gradient of cross_entropy and a
/// central finite difference with step h, over every parameter of a random
/// 2 x 5 network on 10 random instances with random class weights.
inline double gradient_check_error(std::uint64_t seed, double h = 1e-5) {
    Rng rng(seed);
    const std::size_t n_in = 2 + rng() % 4;
    Network net = Network::random(n_in, 2, 5, rng);
    std::vector<double> params = net.parameters();
    std::normal_distribution<double> gauss(0.0, 0.3);
    for (auto& p : params) p += gauss(rng); // non-zero biases, less symmetric weights
    net.set_parameters(params);

    Matrix x(10, n_in);
    std::vector<int> y(10);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < n_in; ++c) x(r, c) = unit(rng);
        y[r] = static_cast<int>(r % 2);
    }
    std::vector<std::size_t> rows(10);
    for (std::size_t r = 0; r < 10; ++r) rows[r] = r;
    const ClassWeights weights{1.0 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0};

    std::vector<double> analytic;
    cross_entropy(net, x, y, rows, weights, &analytic);

    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        std::vector<double> probe = params;
        probe[k] = params[k] + h;
        net.set_parameters(probe);
        const double up = cross_entropy(net, x, y, rows, weights);
        probe[k] = params[k] - h;
        net.set_parameters(probe);
        const double down = cross_entropy(net, x, y, rows, weights);
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / scale);
    }
    net.set_parameters(params);
    return worst;
}

/// Completed epochs minus the early-stopping bound min(max_epochs, best + patience),
/// read off a per-epoch loss log (<= 0 means the contract holds).
inline long early_stopping_excess(const std::vector<double>& log, std::size_t patience, std::size_t max_epochs) {
    const auto best = static_cast<std::size_t>(std::min_element(log.begin(), log.end()) - log.begin()) + 1;
    const std::size_t bound = std::min(max_epochs, best + patience);
    return static_cast<long>(log.size()) - static_cast<long>(bound);
}

} // namespace lowdim::testing

#endif
