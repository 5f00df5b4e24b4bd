#include "cgs/nn/adam.hpp"

#include <cmath>

#include "cgs/errors.hpp"

namespace cgs::nn {

AdamState::AdamState(AdamConfig config, std::vector<std::size_t> block_sizes) : config_(config) {
    require(config_.learning_rate > 0.0, "Adam: learning rate must be positive");
    require(config_.beta1 >= 0.0 && config_.beta1 < 1.0, "Adam: beta1 must lie in [0, 1)");
    require(config_.beta2 >= 0.0 && config_.beta2 < 1.0, "Adam: beta2 must lie in [0, 1)");
    require(config_.epsilon > 0.0, "Adam: epsilon must be positive");
    for (std::size_t n : block_sizes) {
        m_.emplace_back(n, 0.0);
        v_.emplace_back(n, 0.0);
    }
}

void AdamState::step(std::span<const ParamBlock> blocks) {
    require(blocks.size() == m_.size(), "Adam: expected " + std::to_string(m_.size()) + " parameter blocks, got " +
                                            std::to_string(blocks.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        require(blocks[b].values.size() == m_[b].size() && blocks[b].grads.size() == m_[b].size(),
                "Adam: shape mismatch for parameter '" + blocks[b].name + "'");
        for (double g : blocks[b].grads)
            if (!std::isfinite(g)) throw NumericError("Adam: non-finite gradient in parameter '" + blocks[b].name + "'");
    }
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto& m = m_[b];
        auto& v = v_[b];
        const auto& blk = blocks[b];
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double g = blk.grads[i];
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            blk.values[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

AdamState make_adam_state(const Mlp& model, AdamConfig config) {
    std::vector<std::size_t> sizes;
    for (const Layer& l : model.layers()) {
        sizes.push_back(l.weight.size());
        sizes.push_back(l.bias.size());
    }
    return AdamState(config, std::move(sizes));
}

void adam_step(Mlp& model, const Gradients& grads, AdamState& state) {
    require(grads.layers.size() == model.num_layers(),
            "adam_step: gradients cover " + std::to_string(grads.layers.size()) + " of " +
                std::to_string(model.num_layers()) + " layers");
    std::vector<ParamBlock> blocks;
    auto layers = model.mutable_layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        blocks.push_back({"layer " + std::to_string(i) + " weight", layers[i].weight.values(),
                          grads.layers[i].weight.values()});
        blocks.push_back({"layer " + std::to_string(i) + " bias", layers[i].bias, grads.layers[i].bias});
    }
    state.step(blocks);
}

}  // namespace cgs::nn
