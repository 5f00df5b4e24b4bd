#include "cgs/shaping/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgs/errors.hpp"
#include "cgs/gan/gan.hpp"
#include "cgs/nn/adam.hpp"
#include "cgs/nn/critic.hpp"

namespace cgs::shaping {

void ShapingConfig::validate() const {
    require(batch_size > 0, "shape.batch_size must be positive");
    require(learning_rate > 0.0, "shape.learning_rate must be positive");
    require(threshold_refresh > 0, "shape.threshold_refresh must be positive");
    require(threshold_batch > 0, "shape.threshold_batch must be positive");
    refinement.validate();
    for (std::size_t c : checkpoints)
        require(c <= iterations, "shape.checkpoints: index " + std::to_string(c) + " exceeds iterations " +
                                     std::to_string(iterations));
}

ShapingResult shape_discriminator(const nn::Mlp& generator, nn::Mlp discriminator, const ShapingConfig& config,
                                  const eval::MixtureSpec& mixture, Rng& rng) {
    mixture.validate();
    return shape_discriminator(
        generator, std::move(discriminator), config,
        [&mixture](std::size_t n, Rng& r) { return eval::sample_mixture(mixture, n, r); }, rng);
}

ShapingResult shape_discriminator(const nn::Mlp& generator, nn::Mlp discriminator, const ShapingConfig& config,
                                  const RealSampler& reals, Rng& rng) {
    config.validate();
    gan::GanPair{generator, discriminator}.validate();

    collab::RefinementConfig refine = config.refinement;
    refine.termination = collab::Termination::Deterministic;

    nn::AdamState state = nn::make_adam_state(discriminator, {config.learning_rate});
    std::vector<std::size_t> schedule = config.checkpoints;
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    auto next = schedule.begin();

    ShapingResult result;
    for (std::size_t it = 0;; ++it) {
        while (next != schedule.end() && *next == it) {
            result.checkpoints.emplace_back(it, discriminator);
            ++next;
        }
        if (it == config.iterations) break;

        const nn::MlpCritic critic(discriminator);
        if (it % config.threshold_refresh == 0) {
            refine.threshold = collab::compute_threshold(critic, reals(config.threshold_batch, rng));
        }
        const Matrix2D latents = gan::sample_latents(config.batch_size, generator.input_dim(), rng);
        const Matrix2D refined = collab::refine_batch(generator, critic, refine, latents, rng).refined;
        const Matrix2D real = reals(config.batch_size, rng);

        gan::DiscriminatorStep step;
        try {
            step = gan::discriminator_step(discriminator, state, real, refined);
        } catch (const NumericError& e) {
            throw NumericError("shape_discriminator: iteration " + std::to_string(it + 1) + ": " + e.what());
        }
        if (!std::isfinite(step.loss))
            throw NumericError("shape_discriminator: non-finite loss at iteration " + std::to_string(it + 1));
        result.log.push_back({it + 1, step.loss, step.mean_real_score, step.mean_fake_score, refine.threshold});
    }
    return result;
}

}  // namespace cgs::shaping
