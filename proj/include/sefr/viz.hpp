#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sefr/core.hpp"

namespace sefr {

/// -1 -> 0, 0 -> 128, 1 -> 255; values outside [-1, 1] saturate.
std::uint8_t weight_to_gray(double w) noexcept;

/// Binary PGM (P5, maxval 255).
std::string encode_pgm(std::size_t width, std::size_t height, std::span<const std::uint8_t> pixels);

struct WeightImage {
    /// Class the weight map belongs to (the positive label for a binary model).
    Label label;
    std::string pgm;
};

/// One image per binary model, row-major over the features. Throws
/// ShapeMismatch unless width * height equals the feature count.
std::vector<WeightImage> weight_images(const Model& model, std::size_t width, std::size_t height);

} // namespace sefr
