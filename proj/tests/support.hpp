#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "cgs/collab/refine.hpp"
#include "cgs/matrix.hpp"
#include "cgs/nn/critic.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace testing {

using cgs::Matrix2D;
using cgs::Rng;
namespace nn = cgs::nn;

inline Matrix2D random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix2D m(rows, cols);
    for (double& v : m.values()) v = normal(rng);
    return m;
}

/// Random MLP with random biases (make_mlp zeroes them) and random activations.
inline nn::Mlp random_mlp(std::vector<std::size_t> widths, Rng& rng, nn::Activation output) {
    const nn::Activation choices[] = {nn::Activation::leaky_relu(0.2), nn::Activation::tanh(),
                                      nn::Activation::sigmoid(), nn::Activation::identity()};
    std::vector<nn::Layer> layers;
    std::uniform_int_distribution<int> pick(0, 3);
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        nn::Layer layer;
        layer.weight = random_matrix(widths[i], widths[i + 1], rng, 1.0 / std::sqrt(static_cast<double>(widths[i])));
        layer.bias.resize(widths[i + 1]);
        std::normal_distribution<double> normal(0.0, 0.3);
        for (double& b : layer.bias) b = normal(rng);
        layer.activation = i + 2 == widths.size() ? output : choices[pick(rng)];
        layers.push_back(std::move(layer));
    }
    return nn::Mlp(std::move(layers));
}

/// Relative error with a floor on the denominator. A central difference with
/// h = 1e-6 carries roughly 1e-10 of rounding noise, so entries below the
/// floor are compared absolutely (tolerance 1e-4 * 1e-5).
inline double rel_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5});
}

/// Central difference of f at x along every coordinate of `values`.
inline std::vector<double> central_differences(std::vector<double>& values, const std::function<double()>& f,
                                               double h = 1e-6) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double keep = values[i];
        values[i] = keep + h;
        const double up = f();
        values[i] = keep - h;
        const double down = f();
        values[i] = keep;
        out[i] = (up - down) / (2 * h);
    }
    return out;
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t entries = 0;
};

/// Full backward of L = sum(probe .* forward(model, x)) against central
/// differences over every weight, bias and input entry.
inline GradCheck check_mlp_gradients(nn::Mlp model, Matrix2D x, const Matrix2D& probe) {
    auto loss = [&] {
        const Matrix2D out = nn::predict(model, x);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += probe.values()[i] * out.values()[i];
        return s;
    };
    const nn::Gradients g = nn::backward(nn::forward(model, x), probe, nn::BackwardMode::Full);

    GradCheck res;
    auto compare = [&](std::span<double> params, std::span<const double> analytic) {
        std::vector<double> buf(params.begin(), params.end());
        auto f = [&] {
            std::copy(buf.begin(), buf.end(), params.begin());
            return loss();
        };
        const std::vector<double> numeric = central_differences(buf, f);
        std::copy(buf.begin(), buf.end(), params.begin());
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            res.max_rel_error = std::max(res.max_rel_error, rel_error(analytic[i], numeric[i]));
            ++res.entries;
        }
    };
    auto layers = model.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        compare(layers[l].weight.values(), g.layers[l].weight.values());
        compare(layers[l].bias, g.layers[l].bias);
    }
    compare(x.values(), g.input.values());
    return res;
}

/// grad_wrt_activation against central differences of
/// -mean_i log D(partial_forward(G, layer, x)_i).
inline GradCheck check_refinement_gradient(const nn::Mlp& generator, const nn::Mlp& discriminator, std::size_t layer,
                                           Matrix2D activation) {
    const nn::MlpCritic critic(discriminator);
    const Matrix2D analytic = cgs::collab::grad_wrt_activation(generator, critic, layer, activation);
    auto loss = [&] {
        const Matrix2D out = nn::partial_forward(generator, layer, activation);
        const std::vector<double> logits = critic.logits(out);
        double s = 0.0;
        // -log sigmoid(F) = log1p(exp(-F)), written out independently of the library.
        for (double f : logits) s += f > 0 ? std::log1p(std::exp(-f)) : -f + std::log1p(std::exp(f));
        return s / static_cast<double>(logits.size());
    };
    std::vector<double> buf(activation.values().begin(), activation.values().end());
    auto f = [&] {
        std::copy(buf.begin(), buf.end(), activation.values().begin());
        return loss();
    };
    const std::vector<double> numeric = central_differences(buf, f);
    GradCheck res;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        res.max_rel_error = std::max(res.max_rel_error, rel_error(analytic.values()[i], numeric[i]));
        ++res.entries;
    }
    return res;
}

}  // namespace testing
