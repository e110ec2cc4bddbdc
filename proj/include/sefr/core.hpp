#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sefr/feature_matrix.hpp"

namespace sefr {

inline constexpr double kDefaultEpsilon = 1e-7;

/// Which of the two labels in a binary problem plays the positive side.
struct BinaryLabels {
    Label positive;
    Label negative;
};

/// Picks the designation for a two-class label vector. Without an explicit
/// `positive`, the greater label (see label_less) is positive. Throws
/// MissingClass for fewer than two distinct labels and InvalidArgument for
/// more than two or an unknown `positive`.
BinaryLabels designate_binary(const LabelVector& y, const std::optional<Label>& positive = std::nullopt);

struct ClassMeans {
    std::vector<double> mu_pos;
    std::vector<double> mu_neg;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct ScoreStats {
    double tau_pos = 0.0;
    double tau_neg = 0.0;
};

/// Hyperplane w.x + b; records scoring <= 0 are negative.
struct BinaryModel {
    std::vector<double> weights;
    double bias = 0.0;
    double epsilon = kDefaultEpsilon;
    Label positive_label;
    Label negative_label;

    std::size_t feature_count() const noexcept { return weights.size(); }

    friend bool operator==(const BinaryModel&, const BinaryModel&) = default;
};

/// One-against-all ensemble. models[i] treats classes[i] as its negative
/// side and every other class as positive; prediction takes the argmin.
struct MulticlassModel {
    std::vector<Label> classes;
    std::vector<BinaryModel> models;

    std::size_t feature_count() const noexcept { return models.empty() ? 0 : models.front().feature_count(); }

    friend bool operator==(const MulticlassModel&, const MulticlassModel&) = default;
};

using Model = std::variant<BinaryModel, MulticlassModel>;

/// Intermediate quantities of one binary training run.
struct BinaryTraining {
    ClassMeans means;
    ScoreStats scores;
    BinaryModel model;
};

/// Label of the "everything except `cls`" side of a one-against-all model.
Label complement_label(const Label& cls);

// Means are accumulated exactly and rounded once, so they do not depend on
// record order. Records must carry one of the two designated labels.
ClassMeans class_means(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels);

BinaryModel train_binary(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels,
                         double epsilon = kDefaultEpsilon);
BinaryTraining train_binary_traced(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels,
                                   double epsilon = kDefaultEpsilon);

/// w.x + b, accumulated left to right in one variable.
double decision_score(const BinaryModel& model, std::span<const double> x);
const Label& predict_binary(const BinaryModel& model, std::span<const double> x);

MulticlassModel train_multiclass(const FeatureMatrix& x, const LabelVector& y, double epsilon = kDefaultEpsilon);

std::vector<double> multiclass_scores(const MulticlassModel& model, std::span<const double> x);
/// Index into model.classes of the minimum score; ties go to the lowest index.
std::size_t predict_multiclass_index(const MulticlassModel& model, std::span<const double> x);
const Label& predict_multiclass(const MulticlassModel& model, std::span<const double> x);

std::size_t feature_count(const Model& model) noexcept;
const Label& predict(const Model& model, std::span<const double> x);
LabelVector predict_all(const Model& model, const FeatureMatrix& x);

} // namespace sefr
