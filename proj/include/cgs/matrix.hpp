#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cgs {

/// Dense row-major matrix of doubles. Batches are stored one sample per row.
class Matrix2D {
public:
    Matrix2D() = default;
    Matrix2D(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Takes ownership of `data`; throws ContractError unless
    /// data.size() == rows * cols and every entry is finite.
    Matrix2D(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix2D from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    Matrix2D transposed() const;
    Matrix2D select_rows(std::span<const std::size_t> indices) const;
    /// Appends the rows of `other`; column counts must agree (or this is empty).
    void append_rows(const Matrix2D& other);

    /// Element-wise equality including the sign of zero; used for bit-exact checks.
    friend bool bit_equal(const Matrix2D& a, const Matrix2D& b) noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b. Every output row depends only on the matching row of `a`, with a
/// fixed accumulation order, so results do not depend on the batch size.
Matrix2D matmul(const Matrix2D& a, const Matrix2D& b);
/// aᵀ * b (reduces over rows).
Matrix2D matmul_tn(const Matrix2D& a, const Matrix2D& b);

}  // namespace cgs
