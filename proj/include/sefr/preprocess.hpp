#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sefr/feature_matrix.hpp"

namespace sefr {

/// Per-feature observed range used for min-max scaling onto [0, 1].
struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t feature_count() const noexcept { return min.size(); }

    friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

NormalizationParams fit_minmax(const FeatureMatrix& x);

/// (v - min) / (max - min) clamped to [0, 1]; constant features map to 0.
FeatureMatrix apply_minmax(const FeatureMatrix& x, const NormalizationParams& params);
void apply_minmax_row(std::span<double> row, const NormalizationParams& params);

/// Normalized features packed one unsigned byte per cell, plus byte class
/// ids indexing the ascending class table.
struct QuantizedMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<Label> classes;
    std::vector<std::uint8_t> values; // rows * cols, row-major
    std::vector<std::uint8_t> labels; // one per row

    friend bool operator==(const QuantizedMatrix&, const QuantizedMatrix&) = default;
};

/// Byte for a normalized value: round(v * 255), halves away from zero.
/// Values may stray outside [0, 1] by at most 1e-12.
std::uint8_t quantize_value(double v);
double dequantize_value(std::uint8_t byte) noexcept;

QuantizedMatrix quantize_u8(const FeatureMatrix& x, const LabelVector& y);
std::pair<FeatureMatrix, LabelVector> dequantize(const QuantizedMatrix& q);

// Little-endian "SEFRQ1" container. A class count of 256 is stored as 0.
std::vector<std::uint8_t> encode_quantized(const QuantizedMatrix& q);
QuantizedMatrix decode_quantized(const std::vector<std::uint8_t>& bytes);
void write_quantized(const std::string& path, const QuantizedMatrix& q);
QuantizedMatrix read_quantized(const std::string& path);

} // namespace sefr
