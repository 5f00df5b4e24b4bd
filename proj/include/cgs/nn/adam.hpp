#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgs/nn/mlp.hpp"

namespace cgs::nn {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One named parameter tensor with its gradient, flattened.
struct ParamBlock {
    std::string name;
    std::span<double> values;
    std::span<const double> grads;
};

/// Moment accumulators for a fixed list of parameter blocks.
class AdamState {
public:
    AdamState(AdamConfig config, std::vector<std::size_t> block_sizes);

    const AdamConfig& config() const noexcept { return config_; }
    std::uint64_t steps() const noexcept { return steps_; }

    /// Bias-corrected Adam update. All gradients are checked for finiteness
    /// before any parameter changes; a NumericError names the first bad block.
    void step(std::span<const ParamBlock> blocks);

private:
    AdamConfig config_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::uint64_t steps_ = 0;
};

AdamState make_adam_state(const Mlp& model, AdamConfig config);

/// Applies `grads` (from a Full backward over every layer) to `model`.
void adam_step(Mlp& model, const Gradients& grads, AdamState& state);

}  // namespace cgs::nn
