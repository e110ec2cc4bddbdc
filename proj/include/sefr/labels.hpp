#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "sefr/feature_matrix.hpp"

namespace sefr {

/// Ordering used for every class table: when both labels parse completely
/// as finite decimal numbers they compare numerically (ties fall back to the
/// string), otherwise lexicographically by bytes.
bool label_less(std::string_view a, std::string_view b);

/// Distinct labels in ascending label_less order.
std::vector<Label> class_table(const LabelVector& labels);

/// Index of `label` in `classes`, or classes.size() when absent.
std::size_t class_index(const std::vector<Label>& classes, std::string_view label);

/// Per-class record counts, aligned with `classes`.
std::vector<std::size_t> class_counts(const std::vector<Label>& classes, const LabelVector& labels);

} // namespace sefr
