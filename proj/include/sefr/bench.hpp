#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sefr/core.hpp"
#include "sefr/feature_matrix.hpp"

namespace sefr {

struct SweepResult {
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// Median over repeats.
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    /// Training MACs spent in full passes over the data (2 per cell per
    /// binary model).
    std::uint64_t mac_count = 0;
    /// Every counted training MAC, including the per-feature and per-record
    /// terms.
    std::uint64_t train_mac_total = 0;
    /// MACs to score one record.
    std::uint64_t test_macs_per_record = 0;
    /// Stored model values: (cols + 1) per binary model.
    std::size_t peak_model_values = 0;
};

enum class SweepMode { Auto, Binary, Multiclass };

struct SweepOptions {
    std::size_t repeats = 5;
    std::uint64_t seed = 42;
    double epsilon = kDefaultEpsilon;
    /// Auto trains a binary model on 2-class data, one-against-all otherwise.
    SweepMode mode = SweepMode::Auto;
};

/// Stratified subsample of `count` records: every class keeps at least one
/// record and the rest are shared by largest remainder. Indices ascend.
std::vector<std::size_t> stratified_subsample(const LabelVector& y, std::size_t count, std::uint64_t seed);

/// One result per (rows, cols) grid point, rows-major. Each point trains on a
/// stratified row subsample restricted to the leading `cols` features and
/// scores the same records.
std::vector<SweepResult> sweep(const FeatureMatrix& x, const LabelVector& y, std::span<const std::size_t> row_grid,
                               std::span<const std::size_t> col_grid, const SweepOptions& options = {});

/// CSV with header "rows,cols,train_seconds,test_seconds,mac_count".
std::string sweep_to_csv(std::span<const SweepResult> results);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of ys on xs.
LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys);

} // namespace sefr
