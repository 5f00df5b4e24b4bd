#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cgs/matrix.hpp"
#include "cgs/rng.hpp"

namespace cgs::eval {

/// Mixture of isotropic 2-D Gaussians sharing one standard deviation.
struct MixtureSpec {
    std::vector<std::array<double, 2>> centers;
    double stddev = 0.05;
    std::vector<double> weights;

    std::size_t num_modes() const noexcept { return centers.size(); }
    /// Throws ContractError unless there are 8 distinct centers, stddev > 0,
    /// non-negative weights summing to 1 within 1e-12.
    void validate() const;
    double log_density(std::span<const double> x) const;
};

struct CircleLayout {
    double radius = 2.0;
    double stddev = 0.05;
    double heavy_weight = 0.45;  // each of the two opposed heavy modes
};

/// Eight centers evenly spaced on a circle; modes 0 and 4 (diametrically
/// opposed) carry `heavy_weight` each, the other six share the remainder.
MixtureSpec circle_mixture(const CircleLayout& layout);
MixtureSpec default_mixture();

Matrix2D sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng);
/// As sample_mixture, also reporting the component each row was drawn from.
Matrix2D sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng, std::vector<std::size_t>& components);

}  // namespace cgs::eval
