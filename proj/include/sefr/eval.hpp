#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sefr/core.hpp"
#include "sefr/feature_matrix.hpp"

namespace sefr {

/// counts[t][p] = records of true class t predicted as class p.
struct ConfusionMatrix {
    std::vector<Label> classes;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const noexcept;
};

/// Classes are the union of both label sets, in ascending label order.
ConfusionMatrix confusion(const LabelVector& truth, const LabelVector& predicted);

/// Percent of records on the diagonal.
double accuracy(const ConfusionMatrix& cm);

/// Unweighted mean of per-class F1 (0 when precision + recall is 0), in
/// percent.
double macro_f1(const ConfusionMatrix& cm);

/// k disjoint, ascending index folds covering every record. Within each
/// class, records are shuffled by `seed` and dealt round-robin, continuing
/// from where the previous class stopped.
std::vector<std::vector<std::size_t>> stratified_kfold(const LabelVector& y, std::size_t k, std::uint64_t seed);

struct NearestCentroidModel {
    std::vector<Label> classes;
    FeatureMatrix centroids; // one row per class
};

NearestCentroidModel nearest_centroid_train(const FeatureMatrix& x, const LabelVector& y);
/// Euclidean nearest; ties go to the lowest class index.
const Label& nearest_centroid_predict(const NearestCentroidModel& model, std::span<const double> x);

/// Most frequent label; ties go to the lowest class id.
Label majority_baseline(const LabelVector& y);

enum class CvMode { Binary, Multiclass };
enum class CvNormalization { Full, PerFold };
enum class Classifier { Sefr, NearestCentroid, Majority };

struct CvOptions {
    std::size_t k = 10;
    std::uint64_t seed = 42;
    double epsilon = kDefaultEpsilon;
    CvMode mode = CvMode::Binary;
    CvNormalization normalization = CvNormalization::Full;
    Classifier classifier = Classifier::Sefr;
    /// Binary mode only; defaults to the greater label.
    std::optional<Label> positive_label;
    /// Evaluate folds on separate threads. Results are merged in fold order.
    bool parallel = false;
    std::string dataset;
};

struct FoldMetrics {
    std::size_t index = 0;
    std::size_t test_size = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    CvMode mode = CvMode::Binary;
    CvNormalization normalization = CvNormalization::Full;
    Classifier classifier = Classifier::Sefr;
    /// Micro accuracy over all held-out predictions.
    double accuracy = 0.0;
    /// Macro-F1 of the confusion matrix pooled across folds.
    double macro_f1 = 0.0;
    std::vector<FoldMetrics> folds;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    ConfusionMatrix pooled;
};

EvalReport cross_validate(const FeatureMatrix& x, const LabelVector& y, const CvOptions& options);

inline constexpr std::string_view kEvalVersion = "sefr-eval/1";

std::string report_to_json(const EvalReport& report);

} // namespace sefr
