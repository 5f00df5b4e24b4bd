#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cgs/eval/mixture.hpp"
#include "cgs/matrix.hpp"

namespace cgs::eval {

/// Added to every bucket probability before KL/JS so empty buckets stay finite.
inline constexpr double kHistogramSmoothing = 1e-10;

/// Counts over the 8 mixture modes plus a final "bad sample" bucket.
struct CategoricalHist {
    static constexpr std::size_t kModes = 8;
    static constexpr std::size_t kBad = 8;
    std::array<std::size_t, 9> counts{};

    std::size_t total() const noexcept;
    std::size_t good_total() const noexcept;
};

struct Classification {
    bool good = false;
    std::size_t nearest_mode = 0;
};

/// Good iff the Euclidean distance to the nearest center is strictly below
/// 4 standard deviations. The nearest mode is reported either way.
std::vector<Classification> classify_good(const Matrix2D& samples, const MixtureSpec& spec);
CategoricalHist histogram_of(const Matrix2D& samples, const MixtureSpec& spec);

/// KL(p || q) in nats between two non-negative weight vectors, each
/// normalized, smoothed by `alpha`, and renormalized.
double kl_divergence(std::span<const double> p, std::span<const double> q, double alpha = kHistogramSmoothing);
/// Jensen-Shannon divergence in bits (range [0, 1]), same normalization.
double js_divergence(std::span<const double> p, std::span<const double> q, double alpha = kHistogramSmoothing);

/// KL over the 8 mode buckets (bad bucket excluded). Throws ContractError if
/// either histogram has no good samples.
double kl_categorical(const CategoricalHist& p, const CategoricalHist& q, double alpha = kHistogramSmoothing);
/// JS (bits) over all 9 buckets. Throws ContractError on an empty histogram.
double js_augmented(const CategoricalHist& real, const CategoricalHist& generated,
                    double alpha = kHistogramSmoothing);

struct MethodMetrics {
    std::size_t n = 0;
    double good_fraction = 0.0;
    std::optional<double> kl_good;  // undefined when no sample is good
    double js_augmented = 0.0;
    CategoricalHist histogram;
};

/// Good fraction, KL(real || good generated) over modes, and augmented JS.
/// `real` is the histogram of real draws classified by the same rule.
MethodMetrics evaluate_method(const Matrix2D& samples, const MixtureSpec& spec, const CategoricalHist& real);

}  // namespace cgs::eval
