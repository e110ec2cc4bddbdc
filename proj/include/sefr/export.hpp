#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sefr/core.hpp"
#include "sefr/preprocess.hpp"

namespace sefr {

inline constexpr std::size_t kDefaultFlashBudget = 32768;
/// Golden records whose decision margin is at or below this are left out,
/// so single-precision targets cannot disagree on them.
inline constexpr double kGoldenMargin = 1e-4;

/// Bytes of constant data the exported model occupies: 32-bit float weights
/// and biases plus the NUL-terminated class names.
std::size_t export_footprint(const Model& model);

/// C header declaring the model as static constant arrays. Class index 1 of
/// a binary model is the positive label; multiclass prediction is the argmin
/// over per-class scores. Throws ModelTooLarge past `flash_budget`.
std::string export_model_source(const Model& model, std::size_t flash_budget = kDefaultFlashBudget);

struct GoldenFixture {
    std::vector<std::vector<std::uint8_t>> inputs;
    std::vector<std::size_t> expected;
    std::size_t excluded = 0;
};

/// Expected class index for a byte-quantized record, computed in double
/// precision. Sets `margin` to the distance from the decision boundary.
std::size_t golden_index(const Model& model, std::span<const std::uint8_t> bytes, double& margin);

/// Keeps records whose margin exceeds kGoldenMargin.
GoldenFixture golden_fixture(const Model& model, const std::vector<std::vector<std::uint8_t>>& inputs);

/// Rows of a quantized dataset; its column count must match the model.
std::vector<std::vector<std::uint8_t>> golden_inputs_from(const QuantizedMatrix& q, std::size_t feature_count);
std::vector<std::vector<std::uint8_t>> random_golden_inputs(std::size_t feature_count, std::size_t count,
                                                            std::uint64_t seed);

/// C header with the fixture inputs and expected indices.
std::string export_golden_source(const GoldenFixture& fixture, std::size_t feature_count);

} // namespace sefr
