#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cgs/matrix.hpp"
#include "cgs/rng.hpp"

namespace cgs::nn {

enum class ActivationKind : std::uint8_t { LeakyReLU = 0, Tanh = 1, Sigmoid = 2, Identity = 3 };

struct Activation {
    ActivationKind kind = ActivationKind::Identity;
    double slope = 0.0;  // LeakyReLU only, in (0, 1)

    static Activation leaky_relu(double slope);
    static Activation tanh() { return {ActivationKind::Tanh, 0.0}; }
    static Activation sigmoid() { return {ActivationKind::Sigmoid, 0.0}; }
    static Activation identity() { return {ActivationKind::Identity, 0.0}; }

    double apply(double z) const;
    /// Derivative given the pre-activation `z` and the activation value `a`.
    double derivative(double z, double a) const;

    friend bool operator==(const Activation&, const Activation&) = default;
};

std::string_view activation_name(ActivationKind kind);

/// Affine map followed by an activation: y = act(x W + b), W is in_dim x out_dim.
struct Layer {
    Matrix2D weight;
    std::vector<double> bias;
    Activation activation;

    std::size_t in_dim() const noexcept { return weight.rows(); }
    std::size_t out_dim() const noexcept { return weight.cols(); }
};

class Mlp {
public:
    Mlp() = default;
    /// Throws ContractError if the layers do not chain or a layer is malformed.
    explicit Mlp(std::vector<Layer> layers);

    std::size_t num_layers() const noexcept { return layers_.size(); }
    std::size_t input_dim() const noexcept { return layers_.front().in_dim(); }
    std::size_t output_dim() const noexcept { return layers_.back().out_dim(); }
    /// Width of the activation entering layer `index`; index == num_layers()
    /// gives the output width.
    std::size_t width_at(std::size_t index) const;

    const Layer& layer(std::size_t i) const { return layers_.at(i); }
    std::span<const Layer> layers() const noexcept { return layers_; }
    /// Mutable access for optimizers; callers must keep shapes intact.
    std::span<Layer> mutable_layers() noexcept { return layers_; }

    std::size_t parameter_count() const noexcept;

private:
    std::vector<Layer> layers_;
};

/// Bitwise comparison of every parameter and activation tag.
bool bit_equal(const Mlp& a, const Mlp& b) noexcept;

/// Glorot-uniform weights, zero biases. `widths` = {in, hidden..., out}.
Mlp make_mlp(std::span<const std::size_t> widths, Activation hidden, Activation output, Rng& rng);

/// Activations recorded by a forward pass that starts at `first_layer`.
/// inputs[i] feeds layer first_layer + i; pre[i] is its pre-activation.
/// The trace keeps a pointer to its model, which must outlive it.
struct ForwardTrace {
    const Mlp* model = nullptr;
    std::size_t first_layer = 0;
    std::vector<Matrix2D> inputs;
    std::vector<Matrix2D> pre;
    Matrix2D output;
};

ForwardTrace forward(const Mlp& model, const Matrix2D& batch);
/// Records a trace of layers first_layer..L-1 applied to `activation`.
ForwardTrace forward_from(const Mlp& model, std::size_t first_layer, const Matrix2D& activation);
/// Output of layers first_layer..L-1; first_layer == num_layers() returns the
/// activation unchanged.
Matrix2D partial_forward(const Mlp& model, std::size_t first_layer, const Matrix2D& activation);
Matrix2D predict(const Mlp& model, const Matrix2D& batch);

struct LayerGradient {
    Matrix2D weight;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGradient> layers;  // one per traced layer; empty in InputOnly mode
    Matrix2D input;
};

enum class BackwardMode { Full, InputOnly };

/// Reverse-mode pass given dLoss/dOutput.
Gradients backward(const ForwardTrace& trace, const Matrix2D& grad_output,
                   BackwardMode mode = BackwardMode::Full);
/// Same, seeded with dLoss/d(pre-activation of the last layer). Used for
/// sigmoid heads where the loss gradient is taken with respect to the logit.
Gradients backward_from_pre_activation(const ForwardTrace& trace, const Matrix2D& grad_pre,
                                       BackwardMode mode = BackwardMode::Full);

}  // namespace cgs::nn
