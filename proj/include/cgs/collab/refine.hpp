#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "cgs/matrix.hpp"
#include "cgs/nn/critic.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace cgs::collab {

/// Layer sentinel meaning "the generator output" (data-space refinement).
inline constexpr std::size_t kDataSpace = std::numeric_limits<std::size_t>::max();
/// Layer sentinel meaning "the middle of the generator"; see resolve_layer.
inline constexpr std::size_t kMiddleLayer = kDataSpace - 1;

enum class Termination { Deterministic, Probabilistic };

struct RefinementConfig {
    /// Index of the generator activation that is refined: 0 is the latent
    /// code, k is the input of layer k, and num_layers() is the generator
    /// output. kDataSpace / kMiddleLayer are resolved per generator.
    std::size_t layer = kDataSpace;
    double step_size = 0.1;
    std::size_t max_steps = 50;
    double threshold = 0.5;
    Termination termination = Termination::Deterministic;
    double stop_prob = 0.1;
    /// Samples whose refined activation or output exceeds this magnitude are
    /// frozen at their last valid state.
    double divergence_limit = 1e6;

    void validate() const;
};

/// Concrete activation index for `generator`. The middle layer is the input
/// of layer ceil(L/2) counted from one, i.e. index ceil(L/2) - 1.
std::size_t resolve_layer(std::size_t layer, const nn::Mlp& generator);

enum class StopReason { ThresholdMet, MaxSteps, ProbabilisticStop, Diverged };

std::string_view stop_reason_name(StopReason reason);

struct RefinementTrace {
    std::size_t steps = 0;
    double initial_score = 0.0;
    double final_score = 0.0;  // scored after the last applied update
    std::vector<double> initial_point;
    std::vector<double> final_point;
    StopReason reason = StopReason::MaxSteps;
};

struct RefinementResult {
    Matrix2D refined;
    /// Refined activations at the chosen layer; partial_forward of these
    /// reproduces `refined`.
    Matrix2D activations;
    std::vector<RefinementTrace> traces;
    std::size_t diverged = 0;
};

/// Median of the clamped critic scores of `reals`; even counts average the two
/// middle order statistics.
double compute_threshold(const nn::Critic& critic, const Matrix2D& reals);
double median(std::vector<double> values);

/// Gradient of -mean_i log D(G_tail(x_i)) with respect to the activation rows
/// x_i at `layer` (reverse mode through the critic, then the generator tail).
Matrix2D grad_wrt_activation(const nn::Mlp& generator, const nn::Critic& critic, std::size_t layer,
                             const Matrix2D& activation);

/// Iterates every sample independently: while D(x^k) < threshold and the
/// step budget lasts, x_l <- x_l - step_size * grad of -log D(x) for that
/// sample alone, then x <- partial_forward(G, l, x_l). Probabilistic
/// termination also stops each sample with probability stop_prob per step.
RefinementResult refine_batch(const nn::Mlp& generator, const nn::Critic& critic, const RefinementConfig& config,
                              const Matrix2D& latents, Rng& rng);

}  // namespace cgs::collab
