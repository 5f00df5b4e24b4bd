#include <doctest.h>

#include <cmath>

#include "cgs/collab/refine.hpp"
#include "cgs/errors.hpp"
#include "cgs/eval/mixture.hpp"
#include "cgs/gan/gan.hpp"
#include "cgs/nn/adam.hpp"
#include "cgs/shaping/shaping.hpp"
#include "support.hpp"

using namespace cgs;

namespace {

gan::GanPair small_pair(std::uint64_t seed) {
    gan::Architecture arch;
    arch.hidden_layers = 2;
    arch.hidden_width = 16;
    Rng rng(seed);
    return gan::make_gan(arch, rng);
}

/// Two symmetric LeakyReLU hinges whose slopes cancel on |x| < 1.2: the
/// logit is exactly flat there, so refinement cannot move samples out of it.
/// Sixteen extra random units start with zero output weight.
nn::Mlp plateau_discriminator(Rng& rng) {
    const std::size_t width = 18;
    Matrix2D w1(1, width);
    std::vector<double> b1(width);
    w1(0, 0) = 1.0;
    b1[0] = -1.2;
    w1(0, 1) = -1.0;
    b1[1] = -1.2;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 2; j < width; ++j) {
        w1(0, j) = normal(rng);
        b1[j] = normal(rng);
    }
    Matrix2D w2(width, 1);
    w2(0, 0) = 10.0;
    w2(1, 0) = 10.0;
    return nn::Mlp({nn::Layer{w1, b1, nn::Activation::leaky_relu(0.2)},
                    nn::Layer{w2, {0.8}, nn::Activation::sigmoid()}});
}

Matrix2D bimodal_1d(std::size_t n, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 0.1);
    std::bernoulli_distribution side(0.5);
    Matrix2D x(n, 1);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = (side(rng) ? 2.0 : -2.0) + noise(rng);
    return x;
}

double good_fraction_1d(const Matrix2D& x) {
    std::size_t good = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) good += std::min(std::abs(x(i, 0) - 2), std::abs(x(i, 0) + 2)) < 0.4;
    return static_cast<double>(good) / static_cast<double>(x.rows());
}

double refined_good_fraction(const nn::Mlp& g, const nn::Mlp& d, Rng& rng) {
    const nn::MlpCritic critic(d);
    collab::RefinementConfig cfg;
    cfg.threshold = collab::compute_threshold(critic, bimodal_1d(1000, rng));
    const auto res = collab::refine_batch(g, critic, cfg, gan::sample_latents(4000, 1, rng), rng);
    return good_fraction_1d(res.refined);
}

}  // namespace

TEST_CASE("zero shaping iterations return the discriminator unchanged") {
    const gan::GanPair p = small_pair(1);
    shaping::ShapingConfig cfg;
    cfg.iterations = 0;
    cfg.checkpoints = {0};
    Rng rng(1);
    const auto res = shaping::shape_discriminator(p.generator, p.discriminator, cfg, eval::default_mixture(), rng);
    REQUIRE(res.checkpoints.size() == 1);
    CHECK(nn::bit_equal(res.checkpoints[0].second, p.discriminator));
    CHECK(res.log.empty());
}

TEST_CASE("shaping leaves the generator untouched and logs every iteration") {
    const gan::GanPair p = small_pair(2);
    const nn::Mlp g_copy = p.generator;
    shaping::ShapingConfig cfg;
    cfg.iterations = 20;
    cfg.batch_size = 16;
    cfg.checkpoints = {10, 20};
    Rng rng(2);
    const auto res = shaping::shape_discriminator(p.generator, p.discriminator, cfg, eval::default_mixture(), rng);
    CHECK(nn::bit_equal(p.generator, g_copy));
    CHECK(res.checkpoints.size() == 2);
    CHECK(res.log.size() == 20);
    CHECK_FALSE(nn::bit_equal(res.checkpoints[1].second, p.discriminator));
}

TEST_CASE("each shaping step is a discriminator step on freshly refined fakes") {
    const gan::GanPair p = small_pair(3);
    const eval::MixtureSpec mix = eval::default_mixture();
    shaping::ShapingConfig cfg;
    cfg.iterations = 2;
    cfg.batch_size = 32;
    cfg.threshold_batch = 200;
    cfg.refinement.max_steps = 5;
    cfg.checkpoints = {2};
    Rng rng(3);
    const auto res = shaping::shape_discriminator(p.generator, p.discriminator, cfg, mix, rng);

    // Replay the documented draw order by hand.
    Rng replay(3);
    nn::Mlp d = p.discriminator;
    nn::AdamState st = nn::make_adam_state(d, {cfg.learning_rate});
    collab::RefinementConfig rc = cfg.refinement;
    for (std::size_t it = 0; it < 2; ++it) {
        const nn::MlpCritic critic(d);
        if (it == 0) rc.threshold = collab::compute_threshold(critic, eval::sample_mixture(mix, 200, replay));
        const Matrix2D z = gan::sample_latents(32, 2, replay);
        const Matrix2D fake = collab::refine_batch(p.generator, critic, rc, z, replay).refined;
        const Matrix2D real = eval::sample_mixture(mix, 32, replay);
        const double expected = gan::d_loss(d, real, fake);
        gan::discriminator_step(d, st, real, fake);
        CHECK(res.log[it].loss == doctest::Approx(expected).epsilon(1e-12));
        CHECK(res.log[it].threshold == rc.threshold);
    }
    CHECK(nn::bit_equal(d, res.checkpoints[0].second));
}

TEST_CASE("without refinement steps shaping is plain fine-tuning on generator samples") {
    const gan::GanPair p = small_pair(4);
    shaping::ShapingConfig cfg;
    cfg.iterations = 3;
    cfg.batch_size = 16;
    cfg.refinement.max_steps = 0;
    cfg.checkpoints = {3};
    Rng a(4);
    const auto res = shaping::shape_discriminator(p.generator, p.discriminator, cfg, eval::default_mixture(), a);
    CHECK(res.log.size() == 3);
    for (const auto& row : res.log) CHECK(std::isfinite(row.loss));
}

TEST_CASE("shaping flattens a spurious plateau so more refined samples reach the modes") {
    const nn::Mlp g({nn::Layer{Matrix2D(1, 1, 1.0), {0.0}, nn::Activation::identity()}});
    shaping::ShapingConfig cfg;
    cfg.iterations = 2000;
    cfg.batch_size = 64;
    cfg.learning_rate = 1e-3;
    cfg.threshold_batch = 500;
    cfg.checkpoints = {2000};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const nn::Mlp d0 = plateau_discriminator(rng);
        Rng eval_before(1000 + seed), eval_after(1000 + seed);
        const double before = refined_good_fraction(g, d0, eval_before);
        const auto res = shaping::shape_discriminator(g, d0, cfg, bimodal_1d, rng);
        const double after = refined_good_fraction(g, res.checkpoints[0].second, eval_after);
        CAPTURE(seed);
        CAPTURE(before);
        CAPTURE(after);
        CHECK(after > before);
    }
}

TEST_CASE("shaping config validation") {
    shaping::ShapingConfig cfg;
    cfg.checkpoints = {6000};
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = {};
    cfg.threshold_refresh = 0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
}
