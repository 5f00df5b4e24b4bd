#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "cgs/collab/refine.hpp"
#include "cgs/eval/mixture.hpp"
#include "cgs/nn/mlp.hpp"
#include "cgs/rng.hpp"

namespace cgs::shaping {

struct ShapingConfig {
    std::size_t iterations = 5000;
    std::size_t batch_size = 128;
    double learning_rate = 1e-4;
    /// Refinement used to draw the fake batch. Termination is always
    /// deterministic during shaping and the threshold is replaced by the
    /// median real score, refreshed every `threshold_refresh` iterations.
    collab::RefinementConfig refinement;
    std::size_t threshold_refresh = 500;
    std::size_t threshold_batch = 1000;
    std::vector<std::size_t> checkpoints{5000};

    void validate() const;
};

struct ShapingLogRow {
    std::size_t iteration = 0;
    double loss = 0.0;
    double mean_real_score = 0.0;
    double mean_refined_score = 0.0;
    double threshold = 0.0;
};

struct ShapingResult {
    std::vector<std::pair<std::size_t, nn::Mlp>> checkpoints;
    std::vector<ShapingLogRow> log;
};

/// Fine-tunes `discriminator` against samples refined with the current
/// discriminator while `generator` stays frozen. Each iteration draws
/// batch_size refined fakes and batch_size reals and takes one Adam step on
/// -E[log D(real)] - E[log(1 - D(refined))]. With refinement.max_steps == 0
/// this is plain discriminator fine-tuning on raw generator samples.
ShapingResult shape_discriminator(const nn::Mlp& generator, nn::Mlp discriminator, const ShapingConfig& config,
                                  const eval::MixtureSpec& mixture, Rng& rng);

/// Draws `n` real samples.
using RealSampler = std::function<Matrix2D(std::size_t n, Rng& rng)>;

/// As above with an arbitrary source of real samples.
ShapingResult shape_discriminator(const nn::Mlp& generator, nn::Mlp discriminator, const ShapingConfig& config,
                                  const RealSampler& reals, Rng& rng);

}  // namespace cgs::shaping
