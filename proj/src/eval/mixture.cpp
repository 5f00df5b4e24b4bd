#include "cgs/eval/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "cgs/errors.hpp"

namespace cgs::eval {

void MixtureSpec::validate() const {
    require(centers.size() == 8, "mixture: exactly 8 centers are required");
    require(weights.size() == centers.size(), "mixture: one weight per center is required");
    require(stddev > 0.0 && std::isfinite(stddev), "mixture: stddev must be positive");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0 && std::isfinite(w), "mixture: weights must be non-negative");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "mixture: weights must sum to 1");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            require(centers[i] != centers[j], "mixture: centers must be distinct");
}

double MixtureSpec::log_density(std::span<const double> x) const {
    require(x.size() == 2, "mixture: log_density expects a 2-D point");
    const double var = stddev * stddev;
    const double log_norm = -std::log(2.0 * std::numbers::pi * var);
    // log-sum-exp over components
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(centers.size());
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const double dx = x[0] - centers[k][0];
        const double dy = x[1] - centers[k][1];
        terms[k] = weights[k] > 0.0 ? std::log(weights[k]) + log_norm - 0.5 * (dx * dx + dy * dy) / var
                                    : -std::numeric_limits<double>::infinity();
        best = std::max(best, terms[k]);
    }
    if (!std::isfinite(best)) return best;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - best);
    return best + std::log(sum);
}

MixtureSpec circle_mixture(const CircleLayout& layout) {
    require(layout.heavy_weight > 0.0 && layout.heavy_weight < 0.5, "mixture: heavy_weight must lie in (0, 0.5)");
    MixtureSpec spec;
    spec.stddev = layout.stddev;
    const double light = (1.0 - 2.0 * layout.heavy_weight) / 6.0;
    for (int k = 0; k < 8; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / 8.0;
        spec.centers.push_back({layout.radius * std::cos(angle), layout.radius * std::sin(angle)});
        spec.weights.push_back(k == 0 || k == 4 ? layout.heavy_weight : light);
    }
    spec.validate();
    return spec;
}

MixtureSpec default_mixture() { return circle_mixture(CircleLayout{}); }

Matrix2D sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng, std::vector<std::size_t>& components) {
    std::discrete_distribution<std::size_t> pick(spec.weights.begin(), spec.weights.end());
    std::normal_distribution<double> noise(0.0, spec.stddev);
    Matrix2D out(n, 2);
    components.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = pick(rng);
        components[i] = k;
        out(i, 0) = spec.centers[k][0] + noise(rng);
        out(i, 1) = spec.centers[k][1] + noise(rng);
    }
    return out;
}

Matrix2D sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng) {
    std::vector<std::size_t> unused;
    return sample_mixture(spec, n, rng, unused);
}

}  // namespace cgs::eval
