#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cgs/eval/mixture.hpp"
#include "cgs/matrix.hpp"
#include "cgs/nn/adam.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace cgs::gan {

struct Architecture {
    std::size_t latent_dim = 2;
    std::size_t data_dim = 2;
    std::size_t hidden_layers = 6;
    std::size_t hidden_width = 64;
    double leaky_slope = 0.2;
};

/// Generator latent_dim -> data_dim (identity output) and discriminator
/// data_dim -> 1 (sigmoid output).
struct GanPair {
    nn::Mlp generator;
    nn::Mlp discriminator;

    std::size_t latent_dim() const noexcept { return generator.input_dim(); }
    /// Throws ContractError if the pair does not fit together.
    void validate() const;
};

GanPair make_gan(const Architecture& arch, Rng& rng);

/// Standard-normal latents, one row per sample.
Matrix2D sample_latents(std::size_t n, std::size_t latent_dim, Rng& rng);

struct Proposals {
    Matrix2D latents;
    Matrix2D samples;
};

Proposals propose_samples(const nn::Mlp& generator, std::size_t n, Rng& rng);

/// -mean(log D(real)) - mean(log(1 - D(fake))) over clamped scores.
double d_loss_from_scores(std::span<const double> real_scores, std::span<const double> fake_scores);
/// -mean(log D(fake)) over clamped scores.
double g_loss_ns_from_scores(std::span<const double> fake_scores);

double d_loss(const nn::Mlp& discriminator, const Matrix2D& real, const Matrix2D& fake);
double g_loss_ns(const nn::Mlp& discriminator, const Matrix2D& fake);

struct DiscriminatorStep {
    double loss = 0.0;  // equals d_loss on the same batches, before the update
    double mean_real_score = 0.0;
    double mean_fake_score = 0.0;
};

/// One Adam step on the discriminator objective. Gradients are taken with
/// respect to the logit, where -log D has derivative -(1 - D).
DiscriminatorStep discriminator_step(nn::Mlp& discriminator, nn::AdamState& state, const Matrix2D& real, const Matrix2D& fake);

/// One Adam step on the generator with the non-saturating loss for the given
/// latents. Returns the loss before the update.
double generator_step(nn::Mlp& generator, const nn::Mlp& discriminator, nn::AdamState& state, const Matrix2D& latents);

struct TrainConfig {
    std::size_t iterations = 9000;
    std::size_t batch_size = 128;
    std::size_t d_steps_per_g_step = 1;
    double g_learning_rate = 1e-4;
    double d_learning_rate = 1e-4;
    std::vector<std::size_t> checkpoints{1000, 9000};
    Architecture architecture;

    void validate() const;
};

struct TrainLogRow {
    std::size_t iteration = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
};

struct TrainResult {
    std::vector<std::pair<std::size_t, GanPair>> checkpoints;
    std::vector<TrainLogRow> log;
};

/// Alternating discriminator/generator Adam updates on mixture data.
/// Checkpoint t is the pair after t iterations (t = 0 is the initialization).
/// Throws NumericError naming the iteration if a loss becomes non-finite.
TrainResult train_gan(const TrainConfig& config, const eval::MixtureSpec& mixture, Rng& rng);

}  // namespace cgs::gan
