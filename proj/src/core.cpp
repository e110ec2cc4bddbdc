#include "sefr/core.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "sefr/error.hpp"
#include "sefr/exact_sum.hpp"
#include "sefr/labels.hpp"
#include "sefr/mac_counter.hpp"

namespace sefr {

namespace {

[[noreturn]] void reject_value(double v, const std::string& where)
{
    if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidValue, "non-finite feature value at " + where);
    throw Error(ErrorCode::NegativeFeature, "negative feature value " + std::to_string(v) + " at " + where);
}

inline bool acceptable(double v) noexcept { return v >= 0.0 && v <= DBL_MAX; }

/// is_positive[i] != 0 marks record i as positive.
ClassMeans means_from_indicator(const FeatureMatrix& x, std::span<const std::uint8_t> is_positive)
{
    const std::size_t rows = x.rows();
    const std::size_t cols = x.cols();
    if (is_positive.size() != rows)
        throw Error(ErrorCode::LengthMismatch, std::to_string(is_positive.size()) + " labels for " +
                                                   std::to_string(rows) + " records");
    if (cols == 0)
        throw Error(ErrorCode::DimensionMismatch, "feature matrix has no columns");

    std::vector<ExactSum> pos(cols);
    std::vector<ExactSum> neg(cols);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const bool positive = is_positive[i] != 0;
        n_pos += positive ? 1 : 0;
        auto& acc = positive ? pos : neg;
        auto row = x.row(i);
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = row[j];
            if (!acceptable(v))
                reject_value(v, "row " + std::to_string(i) + ", column " + std::to_string(j));
            acc[j].add(v);
        }
    }
    detail::count_pass_macs(static_cast<std::uint64_t>(rows) * cols);
    detail::count_macs(rows); // class tallies

    const std::size_t n_neg = rows - n_pos;
    if (n_pos == 0)
        throw Error(ErrorCode::MissingClass, "no positive records");
    if (n_neg == 0)
        throw Error(ErrorCode::MissingClass, "no negative records");

    ClassMeans means;
    means.n_pos = n_pos;
    means.n_neg = n_neg;
    means.mu_pos.resize(cols);
    means.mu_neg.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        means.mu_pos[j] = pos[j].mean(n_pos);
        means.mu_neg[j] = neg[j].mean(n_neg);
    }
    return means;
}

BinaryTraining train_from_indicator(const FeatureMatrix& x, std::span<const std::uint8_t> is_positive,
                                    double epsilon, Label positive_label, Label negative_label)
{
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and >= 0");

    BinaryTraining out;
    out.means = means_from_indicator(x, is_positive);
    const auto& means = out.means;
    const std::size_t cols = x.cols();

    auto& model = out.model;
    model.epsilon = epsilon;
    model.positive_label = std::move(positive_label);
    model.negative_label = std::move(negative_label);
    model.weights.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        const double denom = means.mu_pos[j] + means.mu_neg[j] + epsilon;
        // 0/0 only happens for epsilon == 0 with both means zero.
        model.weights[j] = denom == 0.0 ? 0.0 : (means.mu_pos[j] - means.mu_neg[j]) / denom;
    }
    detail::count_macs(cols);

    ExactSum tau_pos;
    ExactSum tau_neg;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        double score = 0.0;
        for (std::size_t j = 0; j < cols; ++j)
            score += model.weights[j] * row[j];
        (is_positive[i] != 0 ? tau_pos : tau_neg).add(score);
    }
    detail::count_pass_macs(static_cast<std::uint64_t>(x.rows()) * cols);
    detail::count_macs(x.rows());

    out.scores.tau_pos = tau_pos.mean(means.n_pos);
    out.scores.tau_neg = tau_neg.mean(means.n_neg);
    const auto n_pos = static_cast<double>(means.n_pos);
    const auto n_neg = static_cast<double>(means.n_neg);
    model.bias = -(out.scores.tau_pos * n_neg + out.scores.tau_neg * n_pos) / (n_neg + n_pos);
    detail::count_macs(2);
    return out;
}

std::vector<std::uint8_t> binary_indicator(const LabelVector& y, const BinaryLabels& labels)
{
    if (labels.positive == labels.negative)
        throw Error(ErrorCode::InvalidArgument, "positive and negative labels are both '" + labels.positive + "'");
    std::vector<std::uint8_t> is_positive(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == labels.positive)
            is_positive[i] = 1;
        else if (y[i] != labels.negative)
            throw Error(ErrorCode::InvalidArgument,
                        "record " + std::to_string(i) + " has label '" + y[i] + "' outside the binary pair");
    }
    return is_positive;
}

void check_row(std::span<const double> x, std::size_t expected)
{
    if (x.size() != expected)
        throw Error(ErrorCode::DimensionMismatch,
                    "record has " + std::to_string(x.size()) + " features, model expects " + std::to_string(expected));
}

} // namespace

BinaryLabels designate_binary(const LabelVector& y, const std::optional<Label>& positive)
{
    auto classes = class_table(y);
    if (classes.size() < 2)
        throw Error(ErrorCode::MissingClass, "binary training needs two classes, found " + std::to_string(classes.size()));
    if (classes.size() > 2)
        throw Error(ErrorCode::InvalidArgument,
                    "binary training needs exactly two classes, found " + std::to_string(classes.size()));
    if (!positive)
        return {classes[1], classes[0]};
    if (*positive == classes[0])
        return {classes[0], classes[1]};
    if (*positive == classes[1])
        return {classes[1], classes[0]};
    throw Error(ErrorCode::InvalidArgument, "positive label '" + *positive + "' does not occur in the labels");
}

Label complement_label(const Label& cls) { return "!" + cls; }

ClassMeans class_means(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels)
{
    auto is_positive = binary_indicator(y, labels);
    return means_from_indicator(x, is_positive);
}

BinaryTraining train_binary_traced(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels,
                                   double epsilon)
{
    auto is_positive = binary_indicator(y, labels);
    return train_from_indicator(x, is_positive, epsilon, labels.positive, labels.negative);
}

BinaryModel train_binary(const FeatureMatrix& x, const LabelVector& y, const BinaryLabels& labels, double epsilon)
{
    return train_binary_traced(x, y, labels, epsilon).model;
}

double decision_score(const BinaryModel& model, std::span<const double> x)
{
    check_row(x, model.weights.size());
    double score = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!acceptable(x[j]))
            reject_value(x[j], "feature " + std::to_string(j));
        score += model.weights[j] * x[j];
    }
    detail::count_macs(x.size());
    return score + model.bias;
}

const Label& predict_binary(const BinaryModel& model, std::span<const double> x)
{
    return decision_score(model, x) <= 0.0 ? model.negative_label : model.positive_label;
}

MulticlassModel train_multiclass(const FeatureMatrix& x, const LabelVector& y, double epsilon)
{
    if (y.size() != x.rows())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " records");
    MulticlassModel out;
    out.classes = class_table(y);
    if (out.classes.size() < 2)
        throw Error(ErrorCode::MissingClass,
                    "multiclass training needs at least two classes, found " + std::to_string(out.classes.size()));

    std::vector<std::size_t> index(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        index[i] = class_index(out.classes, y[i]);

    std::vector<std::uint8_t> is_positive(y.size());
    out.models.reserve(out.classes.size());
    for (std::size_t c = 0; c < out.classes.size(); ++c) {
        for (std::size_t i = 0; i < y.size(); ++i)
            is_positive[i] = index[i] != c ? 1 : 0;
        out.models.push_back(
            train_from_indicator(x, is_positive, epsilon, complement_label(out.classes[c]), out.classes[c]).model);
    }
    return out;
}

std::vector<double> multiclass_scores(const MulticlassModel& model, std::span<const double> x)
{
    std::vector<double> scores;
    scores.reserve(model.models.size());
    for (const auto& m : model.models)
        scores.push_back(decision_score(m, x));
    return scores;
}

std::size_t predict_multiclass_index(const MulticlassModel& model, std::span<const double> x)
{
    if (model.models.empty())
        throw Error(ErrorCode::InvalidArgument, "multiclass model has no members");
    std::size_t best = 0;
    double best_score = decision_score(model.models[0], x);
    for (std::size_t c = 1; c < model.models.size(); ++c) {
        const double s = decision_score(model.models[c], x);
        if (s < best_score) {
            best = c;
            best_score = s;
        }
    }
    return best;
}

const Label& predict_multiclass(const MulticlassModel& model, std::span<const double> x)
{
    return model.classes[predict_multiclass_index(model, x)];
}

std::size_t feature_count(const Model& model) noexcept
{
    return std::visit([](const auto& m) { return m.feature_count(); }, model);
}

const Label& predict(const Model& model, std::span<const double> x)
{
    if (const auto* b = std::get_if<BinaryModel>(&model))
        return predict_binary(*b, x);
    return predict_multiclass(std::get<MulticlassModel>(model), x);
}

LabelVector predict_all(const Model& model, const FeatureMatrix& x)
{
    LabelVector out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        out.push_back(predict(model, x.row(i)));
    return out;
}

} // namespace sefr
