#include "sefr/feature_matrix.hpp"

#include <algorithm>

#include "sefr/error.hpp"

namespace sefr {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill)
{
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values))
{
    if (values_.size() != rows_ * cols_)
        throw Error(ErrorCode::LengthMismatch, "matrix storage holds " + std::to_string(values_.size()) +
                                                   " values, expected " + std::to_string(rows_ * cols_));
}

FeatureMatrix::FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size())
{
    values_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw Error(ErrorCode::RaggedRows, "initializer rows differ in length");
        values_.insert(values_.end(), r.begin(), r.end());
    }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const
{
    std::vector<double> out;
    out.reserve(indices.size() * cols_);
    for (std::size_t i : indices) {
        if (i >= rows_)
            throw Error(ErrorCode::OutOfRange, "row index " + std::to_string(i) + " out of range");
        auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return FeatureMatrix(indices.size(), cols_, std::move(out));
}

FeatureMatrix FeatureMatrix::leading_cols(std::size_t count) const
{
    if (count > cols_)
        throw Error(ErrorCode::OutOfRange, "requested " + std::to_string(count) + " columns of " + std::to_string(cols_));
    std::vector<double> out;
    out.reserve(rows_ * count);
    for (std::size_t i = 0; i < rows_; ++i) {
        auto r = row(i);
        out.insert(out.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(count));
    }
    return FeatureMatrix(rows_, count, std::move(out));
}

LabelVector select_labels(const LabelVector& labels, std::span<const std::size_t> indices)
{
    LabelVector out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= labels.size())
            throw Error(ErrorCode::OutOfRange, "label index " + std::to_string(i) + " out of range");
        out.push_back(labels[i]);
    }
    return out;
}

} // namespace sefr
