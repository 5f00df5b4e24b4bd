#include "cgs/nn/mlp.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "cgs/errors.hpp"

namespace cgs::nn {

Activation Activation::leaky_relu(double slope) {
    require(slope > 0.0 && slope < 1.0, "LeakyReLU slope must lie in (0, 1)");
    return {ActivationKind::LeakyReLU, slope};
}

double Activation::apply(double z) const {
    switch (kind) {
        case ActivationKind::LeakyReLU: return z > 0.0 ? z : slope * z;
        case ActivationKind::Tanh: return std::tanh(z);
        case ActivationKind::Sigmoid:
            // Branches keep exp() from overflowing for large |z|.
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            else {
                const double e = std::exp(z);
                return e / (1.0 + e);
            }
        case ActivationKind::Identity: return z;
    }
    return z;
}

double Activation::derivative(double z, double a) const {
    switch (kind) {
        case ActivationKind::LeakyReLU: return z > 0.0 ? 1.0 : slope;
        case ActivationKind::Tanh: return 1.0 - a * a;
        case ActivationKind::Sigmoid: return a * (1.0 - a);
        case ActivationKind::Identity: return 1.0;
    }
    return 1.0;
}

std::string_view activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::LeakyReLU: return "leaky_relu";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Identity: return "identity";
    }
    return "unknown";
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
    require(!layers_.empty(), "Mlp: at least one layer is required");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        const std::string where = "Mlp layer " + std::to_string(i);
        require(l.in_dim() > 0 && l.out_dim() > 0, where + ": empty weight matrix");
        require(l.bias.size() == l.out_dim(), where + ": bias length " + std::to_string(l.bias.size()) +
                                                  " != out_dim " + std::to_string(l.out_dim()));
        if (l.activation.kind == ActivationKind::LeakyReLU)
            require(l.activation.slope > 0.0 && l.activation.slope < 1.0,
                    where + ": LeakyReLU slope outside (0, 1)");
        if (i > 0)
            require(layers_[i - 1].out_dim() == l.in_dim(),
                    where + ": in_dim " + std::to_string(l.in_dim()) + " does not match previous out_dim " +
                        std::to_string(layers_[i - 1].out_dim()));
    }
}

std::size_t Mlp::width_at(std::size_t index) const {
    require(index <= layers_.size(), "Mlp::width_at: index " + std::to_string(index) + " out of range");
    return index == layers_.size() ? output_dim() : layers_[index].in_dim();
}

std::size_t Mlp::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
}

bool bit_equal(const Mlp& a, const Mlp& b) noexcept {
    if (a.num_layers() != b.num_layers()) return false;
    for (std::size_t i = 0; i < a.num_layers(); ++i) {
        const Layer& la = a.layer(i);
        const Layer& lb = b.layer(i);
        if (!(la.activation.kind == lb.activation.kind) ||
            std::bit_cast<std::uint64_t>(la.activation.slope) != std::bit_cast<std::uint64_t>(lb.activation.slope))
            return false;
        if (!bit_equal(la.weight, lb.weight) || la.bias.size() != lb.bias.size()) return false;
        for (std::size_t j = 0; j < la.bias.size(); ++j)
            if (std::bit_cast<std::uint64_t>(la.bias[j]) != std::bit_cast<std::uint64_t>(lb.bias[j])) return false;
    }
    return true;
}

Mlp make_mlp(std::span<const std::size_t> widths, Activation hidden, Activation output, Rng& rng) {
    require(widths.size() >= 2, "make_mlp: need at least input and output widths");
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const std::size_t fan_in = widths[i], fan_out = widths[i + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> init(-limit, limit);
        Matrix2D w(fan_in, fan_out);
        for (double& v : w.values()) v = init(rng);
        const bool last = i + 2 == widths.size();
        layers.push_back(Layer{std::move(w), std::vector<double>(fan_out, 0.0), last ? output : hidden});
    }
    return Mlp(std::move(layers));
}

namespace {

void apply_layer(const Layer& layer, const Matrix2D& input, Matrix2D& pre, Matrix2D& out) {
    pre = matmul(input, layer.weight);
    out = Matrix2D(pre.rows(), pre.cols());
    const std::size_t m = pre.cols();
    auto pv = pre.values();
    auto ov = out.values();
    for (std::size_t r = 0; r < pre.rows(); ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            double& z = pv[r * m + j];
            z += layer.bias[j];
            ov[r * m + j] = layer.activation.apply(z);
        }
    }
}

void check_input(const Mlp& model, std::size_t first_layer, const Matrix2D& activation) {
    require(model.num_layers() > 0, "forward: model has no layers");
    require(first_layer <= model.num_layers(),
            "forward: start layer " + std::to_string(first_layer) + " exceeds layer count " +
                std::to_string(model.num_layers()));
    const std::size_t expected = model.width_at(first_layer);
    require(activation.cols() == expected,
            "forward: layer " + std::to_string(first_layer) + " expects width " + std::to_string(expected) +
                " but the batch has " + std::to_string(activation.cols()) + " columns");
}

}  // namespace

ForwardTrace forward_from(const Mlp& model, std::size_t first_layer, const Matrix2D& activation) {
    check_input(model, first_layer, activation);
    ForwardTrace trace;
    trace.model = &model;
    trace.first_layer = first_layer;
    const std::size_t count = model.num_layers() - first_layer;
    trace.inputs.reserve(count);
    trace.pre.resize(count);
    Matrix2D current = activation;
    for (std::size_t i = 0; i < count; ++i) {
        Matrix2D out;
        apply_layer(model.layer(first_layer + i), current, trace.pre[i], out);
        trace.inputs.push_back(std::move(current));
        current = std::move(out);
    }
    trace.output = std::move(current);
    return trace;
}

ForwardTrace forward(const Mlp& model, const Matrix2D& batch) { return forward_from(model, 0, batch); }

Matrix2D partial_forward(const Mlp& model, std::size_t first_layer, const Matrix2D& activation) {
    check_input(model, first_layer, activation);
    Matrix2D current = activation;
    Matrix2D pre, out;
    for (std::size_t i = first_layer; i < model.num_layers(); ++i) {
        apply_layer(model.layer(i), current, pre, out);
        current = std::move(out);
    }
    return current;
}

Matrix2D predict(const Mlp& model, const Matrix2D& batch) { return partial_forward(model, 0, batch); }

namespace {

Gradients backward_impl(const ForwardTrace& trace, Matrix2D delta, BackwardMode mode) {
    const Mlp& model = *trace.model;
    const std::size_t count = trace.inputs.size();
    Gradients grads;
    if (mode == BackwardMode::Full) grads.layers.resize(count);
    for (std::size_t i = count; i-- > 0;) {
        const Layer& layer = model.layer(trace.first_layer + i);
        if (mode == BackwardMode::Full) {
            LayerGradient& g = grads.layers[i];
            g.weight = matmul_tn(trace.inputs[i], delta);
            g.bias.assign(layer.out_dim(), 0.0);
            for (std::size_t r = 0; r < delta.rows(); ++r) {
                auto row = delta.row(r);
                for (std::size_t j = 0; j < row.size(); ++j) g.bias[j] += row[j];
            }
        }
        Matrix2D grad_in = matmul(delta, layer.weight.transposed());
        if (i == 0) {
            grads.input = std::move(grad_in);
            break;
        }
        // Chain through the activation of the previous layer.
        const Layer& prev = model.layer(trace.first_layer + i - 1);
        const Matrix2D& z = trace.pre[i - 1];
        const Matrix2D& a = trace.inputs[i];
        auto gv = grad_in.values();
        auto zv = z.values();
        auto av = a.values();
        for (std::size_t e = 0; e < gv.size(); ++e) gv[e] *= prev.activation.derivative(zv[e], av[e]);
        delta = std::move(grad_in);
    }
    return grads;
}

}  // namespace

Gradients backward_from_pre_activation(const ForwardTrace& trace, const Matrix2D& grad_pre, BackwardMode mode) {
    require(trace.model != nullptr, "backward: trace has no model");
    if (trace.inputs.empty()) {
        require(grad_pre.rows() == trace.output.rows() && grad_pre.cols() == trace.output.cols(),
                "backward: gradient shape does not match the trace output");
        return Gradients{{}, grad_pre};
    }
    require(grad_pre.rows() == trace.pre.back().rows() && grad_pre.cols() == trace.pre.back().cols(),
            "backward: gradient shape " + std::to_string(grad_pre.rows()) + "x" + std::to_string(grad_pre.cols()) +
                " does not match layer " + std::to_string(trace.first_layer + trace.pre.size() - 1) + " output " +
                std::to_string(trace.pre.back().rows()) + "x" + std::to_string(trace.pre.back().cols()));
    return backward_impl(trace, grad_pre, mode);
}

Gradients backward(const ForwardTrace& trace, const Matrix2D& grad_output, BackwardMode mode) {
    require(trace.model != nullptr, "backward: trace has no model");
    require(grad_output.rows() == trace.output.rows() && grad_output.cols() == trace.output.cols(),
            "backward: grad_output shape " + std::to_string(grad_output.rows()) + "x" +
                std::to_string(grad_output.cols()) + " does not match trace output " +
                std::to_string(trace.output.rows()) + "x" + std::to_string(trace.output.cols()));
    if (trace.inputs.empty()) return Gradients{{}, grad_output};
    const Layer& last = trace.model->layer(trace.first_layer + trace.inputs.size() - 1);
    Matrix2D delta = grad_output;
    auto dv = delta.values();
    auto zv = trace.pre.back().values();
    auto av = trace.output.values();
    for (std::size_t e = 0; e < dv.size(); ++e) dv[e] *= last.activation.derivative(zv[e], av[e]);
    return backward_impl(trace, std::move(delta), mode);
}

}  // namespace cgs::nn
