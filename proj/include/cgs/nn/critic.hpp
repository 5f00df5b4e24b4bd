#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cgs/matrix.hpp"
#include "cgs/nn/mlp.hpp"

namespace cgs::nn {

/// Clamp applied to discriminator scores before any log or ratio.
inline constexpr double kScoreClamp = 1e-7;

double clamp_score(double score) noexcept;
/// Numerically stable logistic function.
double sigmoid(double logit) noexcept;

/// Logits and, per row i, seed(F_i) * dF/dx evaluated at x_i.
struct CriticEval {
    std::vector<double> logits;
    Matrix2D gradient;
};

/// A probabilistic real-vs-fake classifier D(x) = sigmoid(F(x)), exposed
/// through its logit F so that gradients stay informative where D saturates.
class Critic {
public:
    virtual ~Critic() = default;

    virtual std::size_t input_dim() const = 0;
    virtual std::vector<double> logits(const Matrix2D& x) const = 0;
    virtual CriticEval evaluate_with_gradient(const Matrix2D& x,
                                              const std::function<double(double)>& seed) const = 0;

    /// Clamped scores D(x) in [kScoreClamp, 1 - kScoreClamp].
    std::vector<double> scores(const Matrix2D& x) const;
};

/// Wraps an MLP whose final activation is Sigmoid; the logit is the final
/// pre-activation. Holds a reference: the model must outlive the critic.
class MlpCritic final : public Critic {
public:
    explicit MlpCritic(const Mlp& model);

    std::size_t input_dim() const override { return model_->input_dim(); }
    std::vector<double> logits(const Matrix2D& x) const override;
    CriticEval evaluate_with_gradient(const Matrix2D& x,
                                      const std::function<double(double)>& seed) const override;

    const Mlp& model() const noexcept { return *model_; }

private:
    const Mlp* model_;
};

}  // namespace cgs::nn
