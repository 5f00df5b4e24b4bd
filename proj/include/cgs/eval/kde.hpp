#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "cgs/matrix.hpp"

namespace cgs::eval {

/// Regular grid of cell centers over [x_min, x_max] x [y_min, y_max].
struct GridSpec {
    double x_min = -3.0, x_max = 3.0;
    double y_min = -3.0, y_max = 3.0;
    std::size_t nx = 120, ny = 120;

    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx); }
    double dy() const noexcept { return (y_max - y_min) / static_cast<double>(ny); }
    double x_at(std::size_t i) const noexcept { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double y_at(std::size_t j) const noexcept { return y_min + (static_cast<double>(j) + 0.5) * dy(); }
};

struct KdeGrid {
    GridSpec grid;
    std::vector<double> density;  // index j * nx + i for point (x_at(i), y_at(j))

    double at(std::size_t i, std::size_t j) const { return density[j * grid.nx + i]; }
};

/// Isotropic Gaussian KDE on the grid. Throws ContractError for an empty
/// sample set or non-positive bandwidth.
KdeGrid kde_grid(const Matrix2D& samples, double bandwidth, const GridSpec& grid = {});

/// Writes "x,y,density" rows.
void write_kde_csv(std::ostream& out, const KdeGrid& kde);

}  // namespace cgs::eval
