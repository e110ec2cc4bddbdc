#include "sefr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

#include "json.hpp"
#include "sefr/error.hpp"
#include "sefr/labels.hpp"
#include "sefr/preprocess.hpp"
#include "sefr/random.hpp"

namespace sefr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view name_of(CvMode m) { return m == CvMode::Binary ? "binary" : "multiclass"; }
std::string_view name_of(CvNormalization n) { return n == CvNormalization::Full ? "full" : "per-fold"; }
std::string_view name_of(Classifier c)
{
    switch (c) {
    case Classifier::Sefr: return "sefr";
    case Classifier::NearestCentroid: return "nearest-centroid";
    case Classifier::Majority: return "majority";
    }
    return "unknown";
}

struct FoldOutcome {
    FoldMetrics metrics;
    LabelVector truth;
    LabelVector predicted;
};

LabelVector fit_and_predict(const FeatureMatrix& train_x, const LabelVector& train_y, const FeatureMatrix& test_x,
                            const CvOptions& options, const std::optional<BinaryLabels>& binary,
                            double& train_seconds, double& test_seconds)
{
    LabelVector out;
    out.reserve(test_x.rows());
    auto start = Clock::now();
    switch (options.classifier) {
    case Classifier::Sefr: {
        Model model = binary ? Model(train_binary(train_x, train_y, *binary, options.epsilon))
                             : Model(train_multiclass(train_x, train_y, options.epsilon));
        train_seconds = seconds_since(start);
        start = Clock::now();
        out = predict_all(model, test_x);
        break;
    }
    case Classifier::NearestCentroid: {
        auto model = nearest_centroid_train(train_x, train_y);
        train_seconds = seconds_since(start);
        start = Clock::now();
        for (std::size_t i = 0; i < test_x.rows(); ++i)
            out.push_back(nearest_centroid_predict(model, test_x.row(i)));
        break;
    }
    case Classifier::Majority: {
        auto label = majority_baseline(train_y);
        train_seconds = seconds_since(start);
        start = Clock::now();
        out.assign(test_x.rows(), label);
        break;
    }
    }
    test_seconds = seconds_since(start);
    return out;
}

FoldOutcome run_fold(const FeatureMatrix& x, const LabelVector& y, const std::vector<std::size_t>& test_idx,
                     std::size_t fold, const CvOptions& options, const std::optional<BinaryLabels>& binary)
{
    std::vector<std::size_t> train_idx;
    train_idx.reserve(x.rows() - test_idx.size());
    for (std::size_t i = 0, t = 0; i < x.rows(); ++i) {
        if (t < test_idx.size() && test_idx[t] == i)
            ++t;
        else
            train_idx.push_back(i);
    }
    FeatureMatrix train_x = x.select_rows(train_idx);
    FeatureMatrix test_x = x.select_rows(test_idx);
    if (options.normalization == CvNormalization::PerFold) {
        auto params = fit_minmax(train_x);
        train_x = apply_minmax(train_x, params);
        test_x = apply_minmax(test_x, params);
    }

    FoldOutcome out;
    out.truth = select_labels(y, test_idx);
    out.predicted = fit_and_predict(train_x, select_labels(y, train_idx), test_x, options, binary,
                                    out.metrics.train_seconds, out.metrics.test_seconds);
    out.metrics.index = fold;
    out.metrics.test_size = test_idx.size();
    auto cm = confusion(out.truth, out.predicted);
    out.metrics.accuracy = accuracy(cm);
    out.metrics.macro_f1 = macro_f1(cm);
    return out;
}

} // namespace

std::size_t ConfusionMatrix::total() const noexcept
{
    std::size_t sum = 0;
    for (const auto& row : counts)
        for (auto c : row)
            sum += c;
    return sum;
}

ConfusionMatrix confusion(const LabelVector& truth, const LabelVector& predicted)
{
    if (truth.size() != predicted.size())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(truth.size()) + " true labels vs " + std::to_string(predicted.size()) + " predictions");
    if (truth.empty())
        throw Error(ErrorCode::LengthMismatch, "no labels to compare");
    LabelVector all = truth;
    all.insert(all.end(), predicted.begin(), predicted.end());
    ConfusionMatrix cm;
    cm.classes = class_table(all);
    cm.counts.assign(cm.classes.size(), std::vector<std::size_t>(cm.classes.size(), 0));
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++cm.counts[class_index(cm.classes, truth[i])][class_index(cm.classes, predicted[i])];
    return cm;
}

double accuracy(const ConfusionMatrix& cm)
{
    const auto total = cm.total();
    if (total == 0)
        throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
    std::size_t diagonal = 0;
    for (std::size_t c = 0; c < cm.classes.size(); ++c)
        diagonal += cm.counts[c][c];
    return 100.0 * static_cast<double>(diagonal) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix& cm)
{
    if (cm.total() == 0)
        throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
    const std::size_t n = cm.classes.size();
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t o = 0; o < n; ++o) {
            predicted += cm.counts[o][c];
            actual += cm.counts[c][o];
        }
        const double tp = static_cast<double>(cm.counts[c][c]);
        const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double recall = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
        if (precision + recall > 0.0)
            sum += 2.0 * precision * recall / (precision + recall);
    }
    return 100.0 * sum / static_cast<double>(n);
}

std::vector<std::vector<std::size_t>> stratified_kfold(const LabelVector& y, std::size_t k, std::uint64_t seed)
{
    if (k < 2 || k > y.size())
        throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + " needs 2 <= k <= " + std::to_string(y.size()));
    const auto classes = class_table(y);
    std::vector<std::vector<std::size_t>> members(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        members[class_index(classes, y[i])].push_back(i);

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (auto& group : members) {
        rng.shuffle(std::span<std::size_t>(group));
        for (std::size_t idx : group) {
            folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    }
    for (auto& fold : folds)
        std::sort(fold.begin(), fold.end());
    return folds;
}

NearestCentroidModel nearest_centroid_train(const FeatureMatrix& x, const LabelVector& y)
{
    if (y.size() != x.rows())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " records");
    NearestCentroidModel model;
    model.classes = class_table(y);
    if (model.classes.empty())
        throw Error(ErrorCode::MissingClass, "no training records");
    model.centroids = FeatureMatrix(model.classes.size(), x.cols());
    std::vector<std::size_t> counts(model.classes.size(), 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto c = class_index(model.classes, y[i]);
        ++counts[c];
        auto target = model.centroids.row(c);
        auto source = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j)
            target[j] += source[j];
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
        for (double& v : model.centroids.row(c))
            v /= static_cast<double>(counts[c]);
    return model;
}

const Label& nearest_centroid_predict(const NearestCentroidModel& model, std::span<const double> x)
{
    if (x.size() != model.centroids.cols())
        throw Error(ErrorCode::DimensionMismatch, "record has " + std::to_string(x.size()) + " features, expected " +
                                                      std::to_string(model.centroids.cols()));
    std::size_t best = 0;
    double best_distance = 0.0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        auto centroid = model.centroids.row(c);
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            d += (x[j] - centroid[j]) * (x[j] - centroid[j]);
        if (c == 0 || d < best_distance) {
            best = c;
            best_distance = d;
        }
    }
    return model.classes[best];
}

Label majority_baseline(const LabelVector& y)
{
    if (y.empty())
        throw Error(ErrorCode::MissingClass, "no labels");
    const auto classes = class_table(y);
    const auto counts = class_counts(classes, y);
    return classes[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin())];
}

EvalReport cross_validate(const FeatureMatrix& x, const LabelVector& y, const CvOptions& options)
{
    if (y.size() != x.rows())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " records");
    if (!(options.epsilon >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");

    std::optional<BinaryLabels> binary;
    if (options.mode == CvMode::Binary)
        binary = designate_binary(y, options.positive_label);

    const auto folds = stratified_kfold(y, options.k, options.seed);
    const FeatureMatrix* data = &x;
    FeatureMatrix normalized;
    if (options.normalization == CvNormalization::Full) {
        normalized = apply_minmax(x, fit_minmax(x));
        data = &normalized;
    }

    std::vector<FoldOutcome> outcomes(folds.size());
    std::vector<std::exception_ptr> errors(folds.size());
    auto work = [&](std::size_t f) {
        try {
            outcomes[f] = run_fold(*data, y, folds[f], f, options, binary);
        } catch (...) {
            errors[f] = std::current_exception();
        }
    };
    if (options.parallel) {
        std::vector<std::jthread> threads;
        threads.reserve(folds.size());
        for (std::size_t f = 0; f < folds.size(); ++f)
            threads.emplace_back(work, f);
    } else {
        for (std::size_t f = 0; f < folds.size(); ++f)
            work(f);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    EvalReport report;
    report.dataset = options.dataset;
    report.k = options.k;
    report.seed = options.seed;
    report.epsilon = options.epsilon;
    report.mode = options.mode;
    report.normalization = options.normalization;
    report.classifier = options.classifier;
    LabelVector truth;
    LabelVector predicted;
    for (auto& o : outcomes) {
        report.folds.push_back(o.metrics);
        report.train_seconds += o.metrics.train_seconds;
        report.test_seconds += o.metrics.test_seconds;
        truth.insert(truth.end(), o.truth.begin(), o.truth.end());
        predicted.insert(predicted.end(), o.predicted.begin(), o.predicted.end());
    }
    report.pooled = confusion(truth, predicted);
    report.accuracy = accuracy(report.pooled);
    report.macro_f1 = macro_f1(report.pooled);
    return report;
}

std::string report_to_json(const EvalReport& report)
{
    nlohmann::ordered_json j;
    j["version"] = kEvalVersion;
    j["dataset"] = report.dataset;
    j["k"] = report.k;
    j["seed"] = report.seed;
    j["epsilon"] = report.epsilon;
    j["mode"] = name_of(report.mode);
    j["normalization"] = name_of(report.normalization);
    j["classifier"] = name_of(report.classifier);
    j["accuracy"] = report.accuracy;
    j["macro_f1"] = report.macro_f1;
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"index", f.index},
                         {"test_size", f.test_size},
                         {"accuracy", f.accuracy},
                         {"macro_f1", f.macro_f1},
                         {"train_seconds", f.train_seconds},
                         {"test_seconds", f.test_seconds}});
    }
    j["folds"] = std::move(folds);
    j["train_seconds"] = report.train_seconds;
    j["test_seconds"] = report.test_seconds;
    j["classes"] = report.pooled.classes;
    j["confusion"] = report.pooled.counts;
    return j.dump(2) + "\n";
}

} // namespace sefr
