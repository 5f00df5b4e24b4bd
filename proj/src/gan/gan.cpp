#include "cgs/gan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgs/errors.hpp"
#include "cgs/nn/critic.hpp"

namespace cgs::gan {

void GanPair::validate() const {
    require(generator.num_layers() > 0 && discriminator.num_layers() > 0, "GanPair: empty network");
    require(generator.output_dim() == discriminator.input_dim(),
            "GanPair: generator output width " + std::to_string(generator.output_dim()) +
                " does not match discriminator input width " + std::to_string(discriminator.input_dim()));
    require(discriminator.output_dim() == 1, "GanPair: discriminator must have one output");
    require(discriminator.layer(discriminator.num_layers() - 1).activation.kind == nn::ActivationKind::Sigmoid,
            "GanPair: discriminator output activation must be Sigmoid");
}

GanPair make_gan(const Architecture& arch, Rng& rng) {
    require(arch.latent_dim > 0 && arch.data_dim > 0 && arch.hidden_width > 0, "make_gan: widths must be positive");
    std::vector<std::size_t> g_widths{arch.latent_dim};
    std::vector<std::size_t> d_widths{arch.data_dim};
    for (std::size_t i = 0; i < arch.hidden_layers; ++i) {
        g_widths.push_back(arch.hidden_width);
        d_widths.push_back(arch.hidden_width);
    }
    g_widths.push_back(arch.data_dim);
    d_widths.push_back(1);
    const auto hidden = nn::Activation::leaky_relu(arch.leaky_slope);
    GanPair pair;
    pair.generator = nn::make_mlp(g_widths, hidden, nn::Activation::identity(), rng);
    pair.discriminator = nn::make_mlp(d_widths, hidden, nn::Activation::sigmoid(), rng);
    return pair;
}

Matrix2D sample_latents(std::size_t n, std::size_t latent_dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix2D z(n, latent_dim);
    for (double& v : z.values()) v = normal(rng);
    return z;
}

Proposals propose_samples(const nn::Mlp& generator, std::size_t n, Rng& rng) {
    Proposals p;
    p.latents = sample_latents(n, generator.input_dim(), rng);
    p.samples = nn::predict(generator, p.latents);
    return p;
}

double d_loss_from_scores(std::span<const double> real_scores, std::span<const double> fake_scores) {
    require(!real_scores.empty() && !fake_scores.empty(), "d_loss: empty batch");
    double real_term = 0.0, fake_term = 0.0;
    for (double s : real_scores) real_term -= std::log(nn::clamp_score(s));
    for (double s : fake_scores) fake_term -= std::log(1.0 - nn::clamp_score(s));
    return real_term / static_cast<double>(real_scores.size()) + fake_term / static_cast<double>(fake_scores.size());
}

double g_loss_ns_from_scores(std::span<const double> fake_scores) {
    require(!fake_scores.empty(), "g_loss_ns: empty batch");
    double sum = 0.0;
    for (double s : fake_scores) sum -= std::log(nn::clamp_score(s));
    return sum / static_cast<double>(fake_scores.size());
}

double d_loss(const nn::Mlp& discriminator, const Matrix2D& real, const Matrix2D& fake) {
    const nn::MlpCritic critic(discriminator);
    return d_loss_from_scores(critic.scores(real), critic.scores(fake));
}

double g_loss_ns(const nn::Mlp& discriminator, const Matrix2D& fake) {
    const nn::MlpCritic critic(discriminator);
    return g_loss_ns_from_scores(critic.scores(fake));
}

namespace {

std::vector<double> output_scores(const nn::ForwardTrace& trace) {
    auto v = trace.output.values();
    return {v.begin(), v.end()};
}

}  // namespace

DiscriminatorStep discriminator_step(nn::Mlp& discriminator, nn::AdamState& state, const Matrix2D& real, const Matrix2D& fake) {
    require(real.rows() > 0 && fake.rows() > 0, "discriminator_step: empty batch");
    // One pass over the stacked batch keeps a single gradient accumulation.
    Matrix2D batch = real;
    batch.append_rows(fake);
    const nn::ForwardTrace trace = nn::forward(discriminator, batch);
    const std::vector<double> scores = output_scores(trace);
    const std::span<const double> all(scores);
    const double loss = d_loss_from_scores(all.first(real.rows()), all.subspan(real.rows()));

    Matrix2D grad_logit(batch.rows(), 1);
    const double wr = 1.0 / static_cast<double>(real.rows());
    const double wf = 1.0 / static_cast<double>(fake.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i)
        grad_logit(i, 0) = i < real.rows() ? -(1.0 - scores[i]) * wr : scores[i] * wf;
    const nn::Gradients grads = nn::backward_from_pre_activation(trace, grad_logit);
    nn::adam_step(discriminator, grads, state);

    DiscriminatorStep out{loss, 0.0, 0.0};
    for (std::size_t i = 0; i < batch.rows(); ++i)
        (i < real.rows() ? out.mean_real_score : out.mean_fake_score) += nn::clamp_score(scores[i]);
    out.mean_real_score /= static_cast<double>(real.rows());
    out.mean_fake_score /= static_cast<double>(fake.rows());
    return out;
}

double generator_step(nn::Mlp& generator, const nn::Mlp& discriminator, nn::AdamState& state,
                      const Matrix2D& latents) {
    require(latents.rows() > 0, "generator_step: empty batch");
    const nn::ForwardTrace g_trace = nn::forward(generator, latents);
    const nn::ForwardTrace d_trace = nn::forward(discriminator, g_trace.output);
    const std::vector<double> scores = output_scores(d_trace);
    const double loss = g_loss_ns_from_scores(scores);

    Matrix2D grad_logit(latents.rows(), 1);
    const double w = 1.0 / static_cast<double>(latents.rows());
    for (std::size_t i = 0; i < latents.rows(); ++i) grad_logit(i, 0) = -(1.0 - scores[i]) * w;
    const Matrix2D grad_x =
        nn::backward_from_pre_activation(d_trace, grad_logit, nn::BackwardMode::InputOnly).input;
    const nn::Gradients grads = nn::backward(g_trace, grad_x);
    nn::adam_step(generator, grads, state);
    return loss;
}

void TrainConfig::validate() const {
    require(batch_size > 0, "train.batch_size must be positive");
    require(d_steps_per_g_step > 0, "train.d_steps_per_g_step must be positive");
    require(g_learning_rate > 0.0 && d_learning_rate > 0.0, "train learning rates must be positive");
    require(!checkpoints.empty(), "train.checkpoints must not be empty");
    for (std::size_t c : checkpoints)
        require(c <= iterations, "train.checkpoints: index " + std::to_string(c) + " exceeds iterations " +
                                     std::to_string(iterations));
}

TrainResult train_gan(const TrainConfig& config, const eval::MixtureSpec& mixture, Rng& rng) {
    config.validate();
    mixture.validate();
    GanPair pair = make_gan(config.architecture, rng);
    pair.validate();
    require(pair.generator.output_dim() == 2, "train_gan: the mixture benchmark is 2-D");

    nn::AdamState g_state = nn::make_adam_state(pair.generator, {config.g_learning_rate});
    nn::AdamState d_state = nn::make_adam_state(pair.discriminator, {config.d_learning_rate});

    std::vector<std::size_t> schedule = config.checkpoints;
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    auto next = schedule.begin();

    TrainResult result;
    result.log.reserve(config.iterations);
    for (std::size_t it = 0;; ++it) {
        while (next != schedule.end() && *next == it) {
            result.checkpoints.emplace_back(it, pair);
            ++next;
        }
        if (it == config.iterations) break;

        double dl = 0.0, gl = 0.0;
        try {
            for (std::size_t s = 0; s < config.d_steps_per_g_step; ++s) {
                const Matrix2D real = eval::sample_mixture(mixture, config.batch_size, rng);
                const Matrix2D fake = propose_samples(pair.generator, config.batch_size, rng).samples;
                dl = discriminator_step(pair.discriminator, d_state, real, fake).loss;
            }
            const Matrix2D z = sample_latents(config.batch_size, pair.latent_dim(), rng);
            gl = generator_step(pair.generator, pair.discriminator, g_state, z);
        } catch (const NumericError& e) {
            throw NumericError("train_gan: iteration " + std::to_string(it + 1) + ": " + e.what());
        }
        if (!std::isfinite(dl) || !std::isfinite(gl))
            throw NumericError("train_gan: non-finite loss at iteration " + std::to_string(it + 1));
        result.log.push_back({it + 1, dl, gl});
    }
    return result;
}

}  // namespace cgs::gan
