#pragma once

#include <vector>

#include "sefr/core.hpp"

namespace sefr::testing {

/// Literal transcription of the training equations: indicator p_i,
/// per-feature means via sum(d_ij * p_i), weight ratio, record scores,
/// class score means, weighted bias. Plain double loops, nothing shared with
/// the library path.
struct NaiveBinary {
    std::vector<double> weights;
    double bias = 0.0;
};

NaiveBinary naive_train_binary(const std::vector<std::vector<double>>& x, const std::vector<int>& is_positive,
                               double epsilon);

double naive_score(const NaiveBinary& model, const std::vector<double>& x);

/// One-against-all: model c has class c as its negative side.
std::vector<NaiveBinary> naive_train_multiclass(const std::vector<std::vector<double>>& x,
                                                const std::vector<int>& class_of, int class_count,
                                                double epsilon);

int naive_predict_multiclass(const std::vector<NaiveBinary>& models, const std::vector<double>& x);

} // namespace sefr::testing
