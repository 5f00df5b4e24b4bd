#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cgs/matrix.hpp"
#include "cgs/nn/critic.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace cgs::mc {

/// D / (1 - D) after clamping: the density ratio p_r / p_g encoded by an
/// optimal discriminator.
double density_ratio(double score) noexcept;

/// Independence-sampler acceptance min{1, (D(y)/D(x)) * ((1-D(x))/(1-D(y)))}
/// for current state x and proposal y, on clamped scores.
double mh_acceptance(double current_score, double proposal_score) noexcept;

/// Acceptance probability sigmoid(F - F_max - log(1 - exp(F - F_max - eps)) - gamma)
/// for a proposal with logit F. gamma = 0 is exact rejection sampling.
double drs_acceptance(double logit, double max_logit, double gamma, double epsilon = 1e-6) noexcept;

/// Closed-form Bayes-optimal discriminator D*(x) = p_r / (p_r + p_g) for two
/// known densities, with logit log p_r(x) - log p_g(x).
class DensityRatioOracle final : public nn::Critic {
public:
    using LogDensity = std::function<double(std::span<const double>)>;

    DensityRatioOracle(std::size_t dim, LogDensity log_target, LogDensity log_proposal);

    std::size_t input_dim() const override { return dim_; }
    std::vector<double> logits(const Matrix2D& x) const override;
    /// Gradient by central differences (step 1e-6); the oracle is only used
    /// as a score source, never for refinement-exactness checks.
    nn::CriticEval evaluate_with_gradient(const Matrix2D& x,
                                          const std::function<double(double)>& seed) const override;

private:
    std::size_t dim_;
    LogDensity log_target_;
    LogDensity log_proposal_;
};

/// Draws `n` proposals.
using Proposer = std::function<Matrix2D(std::size_t n, Rng& rng)>;

Proposer generator_proposer(const nn::Mlp& generator);

struct SamplerStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    bool budget_exhausted = false;

    double acceptance_rate() const noexcept {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
};

struct DrsConfig {
    double gamma = 1.0;
    std::size_t pilot_size = 1000;
    /// Proposal budget as a multiple of the requested sample count.
    std::size_t budget_factor = 100;
    std::size_t chunk = 1024;
    double epsilon = 1e-6;
};

struct DrsResult {
    Matrix2D samples;
    std::vector<double> scores;
    SamplerStats stats;
    double max_logit = 0.0;  // final running maximum
};

/// Discriminator rejection sampling. F_max starts as the maximum logit over a
/// pilot batch and is raised whenever a later proposal exceeds it. Stops after
/// `n` acceptances or budget_factor * n proposals; in the latter case the
/// partial result is returned with stats.budget_exhausted set.
DrsResult drs_sample(const Proposer& propose, const nn::Critic& critic, const DrsConfig& config, std::size_t n,
                     Rng& rng);

struct ChainResult {
    Matrix2D samples;
    std::vector<double> scores;
    /// Per output row: for mh_sample, whether the chain moved away from its
    /// initial proposal; for collab_reject, whether that stream element was accepted.
    std::vector<bool> accepted;
    /// Per output row, the index of the proposal (or stream element) it holds.
    std::vector<std::size_t> states;
    SamplerStats stats;
};

/// For each of `n` outputs, an independence chain initialized at one proposal
/// and advanced over `k` fresh proposals; the final state is returned.
ChainResult mh_sample(const Proposer& propose, const nn::Critic& critic, std::size_t k, std::size_t n, Rng& rng);

/// One independence chain over a stream of (refined sample, clamped score) in
/// arrival order. The first element initializes the chain; row t of the result
/// is the chain state after element t.
ChainResult collab_reject(const Matrix2D& stream, std::span<const double> scores, Rng& rng);

}  // namespace cgs::mc
