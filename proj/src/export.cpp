#include "sefr/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sefr/error.hpp"
#include "sefr/random.hpp"

namespace sefr {

namespace {

const std::vector<BinaryModel>& models_of(const Model& model, std::vector<BinaryModel>& storage)
{
    if (const auto* b = std::get_if<BinaryModel>(&model)) {
        storage = {*b};
        return storage;
    }
    return std::get<MulticlassModel>(model).models;
}

std::vector<Label> class_names(const Model& model)
{
    if (const auto* b = std::get_if<BinaryModel>(&model))
        return {b->negative_label, b->positive_label};
    return std::get<MulticlassModel>(model).classes;
}

std::string float_literal(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v)));
    std::string s = buf;
    if (s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s + "f";
}

std::string c_string(const std::string& s)
{
    std::string out = "\"";
    for (unsigned char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
            out += static_cast<char>(ch);
        } else if (ch < 0x20 || ch >= 0x7f || ch == '?') {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\%03o", ch);
            out += buf;
        } else {
            out += static_cast<char>(ch);
        }
    }
    return out + "\"";
}

} // namespace

std::size_t export_footprint(const Model& model)
{
    std::vector<BinaryModel> storage;
    const auto& models = models_of(model, storage);
    std::size_t bytes = 4 * models.size() * (feature_count(model) + 1);
    for (const auto& name : class_names(model))
        bytes += name.size() + 1;
    return bytes;
}

std::string export_model_source(const Model& model, std::size_t flash_budget)
{
    const auto footprint = export_footprint(model);
    if (footprint > flash_budget)
        throw Error(ErrorCode::ModelTooLarge, "model needs " + std::to_string(footprint) + " bytes, budget is " +
                                                  std::to_string(flash_budget));
    std::vector<BinaryModel> storage;
    const auto& models = models_of(model, storage);
    const auto classes = class_names(model);
    const auto m = feature_count(model);

    std::string out;
    out += "/* SEFR model export. Inputs are bytes b, read as b / 255.0f. */\n";
    out += "#ifndef SEFR_MODEL_H\n#define SEFR_MODEL_H\n\n";
    out += "#define SEFR_FEATURE_COUNT " + std::to_string(m) + "u\n";
    out += "#define SEFR_CLASS_COUNT " + std::to_string(classes.size()) + "u\n";
    out += "#define SEFR_MODEL_COUNT " + std::to_string(models.size()) + "u\n";
    out += "#define SEFR_BINARY " + std::string(std::holds_alternative<BinaryModel>(model) ? "1" : "0") + "\n";
    out += "#define SEFR_FOOTPRINT_BYTES " + std::to_string(footprint) + "u\n\n";

    out += "static const float sefr_weights[SEFR_MODEL_COUNT][SEFR_FEATURE_COUNT] = {\n";
    for (const auto& bm : models) {
        out += "    {";
        for (std::size_t j = 0; j < m; ++j) {
            if (j > 0)
                out += j % 8 == 0 ? ",\n     " : ", ";
            out += float_literal(bm.weights[j]);
        }
        out += "},\n";
    }
    out += "};\n\n";

    out += "static const float sefr_biases[SEFR_MODEL_COUNT] = {";
    for (std::size_t i = 0; i < models.size(); ++i)
        out += (i ? ", " : "") + float_literal(models[i].bias);
    out += "};\n\n";

    out += "static const char *const sefr_classes[SEFR_CLASS_COUNT] = {";
    for (std::size_t i = 0; i < classes.size(); ++i)
        out += (i ? ", " : "") + c_string(classes[i]);
    out += "};\n\n#endif\n";
    return out;
}

std::size_t golden_index(const Model& model, std::span<const std::uint8_t> bytes, double& margin)
{
    if (bytes.size() != feature_count(model))
        throw Error(ErrorCode::DimensionMismatch, "golden record has " + std::to_string(bytes.size()) +
                                                      " bytes, model has " +
                                                      std::to_string(feature_count(model)) + " features");
    std::vector<double> x(bytes.size());
    std::transform(bytes.begin(), bytes.end(), x.begin(), dequantize_value);
    if (const auto* b = std::get_if<BinaryModel>(&model)) {
        const double score = decision_score(*b, x);
        margin = std::abs(score);
        return score > 0.0 ? 1 : 0;
    }
    const auto& mc = std::get<MulticlassModel>(model);
    const auto scores = multiclass_scores(mc, x);
    const auto best = predict_multiclass_index(mc, x);
    margin = INFINITY;
    for (std::size_t c = 0; c < scores.size(); ++c)
        if (c != best)
            margin = std::min(margin, scores[c] - scores[best]);
    return best;
}

GoldenFixture golden_fixture(const Model& model, const std::vector<std::vector<std::uint8_t>>& inputs)
{
    GoldenFixture fixture;
    for (const auto& record : inputs) {
        double margin = 0.0;
        const auto index = golden_index(model, record, margin);
        if (margin > kGoldenMargin) {
            fixture.inputs.push_back(record);
            fixture.expected.push_back(index);
        } else {
            ++fixture.excluded;
        }
    }
    return fixture;
}

std::vector<std::vector<std::uint8_t>> golden_inputs_from(const QuantizedMatrix& q, std::size_t feature_count)
{
    if (q.cols != feature_count)
        throw Error(ErrorCode::DimensionMismatch, "quantized data has " + std::to_string(q.cols) +
                                                      " columns, model has " + std::to_string(feature_count));
    std::vector<std::vector<std::uint8_t>> out;
    for (std::size_t i = 0; i < q.rows; ++i) {
        const auto* row = q.values.data() + i * q.cols;
        out.emplace_back(row, row + q.cols);
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> random_golden_inputs(std::size_t feature_count, std::size_t count,
                                                            std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::vector<std::uint8_t>> out(count, std::vector<std::uint8_t>(feature_count));
    for (auto& record : out)
        for (auto& b : record)
            b = static_cast<std::uint8_t>(rng.below(256));
    return out;
}

std::string export_golden_source(const GoldenFixture& fixture, std::size_t feature_count)
{
    const std::size_t n = fixture.inputs.size();
    // C has no zero-length arrays; an empty fixture keeps one unused slot.
    const std::string extent = n == 0 ? "1" : "SEFR_GOLDEN_COUNT";
    std::string out;
    out += "/* Golden records: quantized inputs and the class index expected for each. */\n";
    out += "#ifndef SEFR_GOLDEN_H\n#define SEFR_GOLDEN_H\n\n";
    out += "#define SEFR_GOLDEN_COUNT " + std::to_string(n) + "u\n";
    out += "#define SEFR_GOLDEN_FEATURES " + std::to_string(feature_count) + "u\n";
    out += "#define SEFR_GOLDEN_EXCLUDED " + std::to_string(fixture.excluded) + "u\n\n";

    out += "static const unsigned char sefr_golden_inputs[" + extent + "][SEFR_GOLDEN_FEATURES] = {\n";
    if (n == 0)
        out += "    {0},\n";
    for (const auto& record : fixture.inputs) {
        if (record.size() != feature_count)
            throw Error(ErrorCode::DimensionMismatch, "golden record width differs from feature count");
        out += "    {";
        for (std::size_t j = 0; j < record.size(); ++j) {
            if (j > 0)
                out += j % 16 == 0 ? ",\n     " : ", ";
            out += std::to_string(record[j]);
        }
        out += "},\n";
    }
    out += "};\n\n";

    out += "static const unsigned int sefr_golden_expected[" + extent + "] = {";
    if (n == 0)
        out += "0";
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            out += i % 16 == 0 ? ",\n    " : ", ";
        out += std::to_string(fixture.expected[i]) + "u";
    }
    out += "};\n\n#endif\n";
    return out;
}

} // namespace sefr
