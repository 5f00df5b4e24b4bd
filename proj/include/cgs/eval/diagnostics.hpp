#pragma once

#include <cstddef>
#include <span>

#include "cgs/matrix.hpp"
#include "cgs/nn/critic.hpp"

namespace cgs::eval {

/// Labels follow the convention real = 1, generated = 0.
double brier_score(std::span<const double> scores, std::span<const int> labels);

struct BrierDecomposition {
    double reliability = 0.0;
    double resolution = 0.0;
    double uncertainty = 0.0;
    /// Brier score with each forecast replaced by its bin's mean forecast;
    /// equals reliability - resolution + uncertainty.
    double grouped_brier = 0.0;
};

/// Murphy decomposition over `bins` equal-width confidence bins on [0, 1].
BrierDecomposition brier_decomposition(std::span<const double> scores, std::span<const int> labels,
                                       std::size_t bins = 10);

/// Sum of residuals over their predicted standard deviation. Throws
/// ContractError when every score is exactly 0 or 1.
double z_statistic(std::span<const double> scores, std::span<const int> labels);

/// Expected calibration error over equal-width bins; empty bins contribute 0.
double ece(std::span<const double> scores, std::span<const int> labels, std::size_t bins = 10);

struct DiagnosisReport {
    double brier = 0.0;
    double z_statistic = 0.0;
    double ece = 0.0;
    std::size_t n = 0;
};

DiagnosisReport diagnose(std::span<const double> scores, std::span<const int> labels, std::size_t ece_bins = 10);
/// Scores `reals` (label 1) and `fakes` (label 0) with the critic, then diagnoses.
DiagnosisReport diagnose(const nn::Critic& critic, const Matrix2D& reals, const Matrix2D& fakes,
                         std::size_t ece_bins = 10);

}  // namespace cgs::eval
