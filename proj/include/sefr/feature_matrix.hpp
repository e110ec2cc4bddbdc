#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sefr {

/// Class ids are opaque strings; numeric-looking labels are never coerced.
using Label = std::string;
using LabelVector = std::vector<Label>;

/// Dense row-major table of feature values.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Takes ownership of row-major `values`; throws LengthMismatch when
    /// values.size() != rows * cols.
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const noexcept
    {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    std::span<const double> values() const noexcept { return values_; }

    /// Rows at `indices`, in the given order.
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
    /// First `count` columns of every row.
    FeatureMatrix leading_cols(std::size_t count) const;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

LabelVector select_labels(const LabelVector& labels, std::span<const std::size_t> indices);

} // namespace sefr
