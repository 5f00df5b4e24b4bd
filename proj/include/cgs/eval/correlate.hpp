#pragma once

#include <span>
#include <vector>

namespace cgs::eval {

struct Correlation {
    double pearson = 0.0;
    double spearman = 0.0;
    double pearson_p = 1.0;   // two-sided, Student-t approximation
    double spearman_p = 1.0;
};

/// Throws ContractError for fewer than 3 points, unequal lengths, or a
/// series with zero variance.
Correlation correlate(std::span<const double> xs, std::span<const double> ys);

/// Ranks starting at 1, ties receiving their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Rescales to [0, 1] by min/max; a constant series maps to all zeros.
std::vector<double> normalize_unit(std::span<const double> values);

}  // namespace cgs::eval
