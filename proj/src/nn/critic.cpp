#include "cgs/nn/critic.hpp"

#include <algorithm>
#include <cmath>

#include "cgs/errors.hpp"

namespace cgs::nn {

double clamp_score(double score) noexcept { return std::clamp(score, kScoreClamp, 1.0 - kScoreClamp); }

double sigmoid(double logit) noexcept { return Activation::sigmoid().apply(logit); }

std::vector<double> Critic::scores(const Matrix2D& x) const {
    std::vector<double> s = logits(x);
    for (double& v : s) v = clamp_score(sigmoid(v));
    return s;
}

MlpCritic::MlpCritic(const Mlp& model) : model_(&model) {
    require(model.num_layers() > 0 && model.output_dim() == 1, "MlpCritic: discriminator must have a single output");
    require(model.layer(model.num_layers() - 1).activation.kind == ActivationKind::Sigmoid,
            "MlpCritic: discriminator output activation must be Sigmoid");
}

std::vector<double> MlpCritic::logits(const Matrix2D& x) const {
    require(x.cols() == model_->input_dim(), "MlpCritic: input width mismatch");
    // Hidden layers, then the final affine map without its sigmoid.
    const std::size_t last = model_->num_layers() - 1;
    Matrix2D hidden = x;
    for (std::size_t i = 0; i < last; ++i) {
        const Layer& layer = model_->layer(i);
        Matrix2D z = matmul(hidden, layer.weight);
        auto zv = z.values();
        const std::size_t m = z.cols();
        for (std::size_t e = 0; e < zv.size(); ++e) zv[e] = layer.activation.apply(zv[e] + layer.bias[e % m]);
        hidden = std::move(z);
    }
    const Layer& head = model_->layer(last);
    const Matrix2D z = matmul(hidden, head.weight);
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = z(i, 0) + head.bias[0];
    return out;
}

CriticEval MlpCritic::evaluate_with_gradient(const Matrix2D& x, const std::function<double(double)>& seed) const {
    require(x.cols() == model_->input_dim(), "MlpCritic: input width mismatch");
    const ForwardTrace trace = forward(*model_, x);
    const auto pre = trace.pre.back().values();
    CriticEval out;
    out.logits.assign(pre.begin(), pre.end());
    Matrix2D grad_pre(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) grad_pre(i, 0) = seed(out.logits[i]);
    out.gradient = backward_from_pre_activation(trace, grad_pre, BackwardMode::InputOnly).input;
    return out;
}

}  // namespace cgs::nn
