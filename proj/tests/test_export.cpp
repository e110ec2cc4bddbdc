#include "doctest.h"

#include "sefr/data.hpp"
#include "sefr/error.hpp"
#include "sefr/export.hpp"
#include "sefr/random.hpp"
#include "support/export_reader.hpp"

using namespace sefr;
using sefr::testing::read_exported_golden;
using sefr::testing::read_exported_model;
using sefr::testing::reference_predict;

namespace {

ErrorCode error_code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected sefr::Error");
    return ErrorCode::IoError;
}

BinaryModel fixture_model()
{
    return BinaryModel{{1.0}, -0.5, 0.0, "pos", "neg"};
}

MulticlassModel random_multiclass(Rng& rng, std::size_t classes, std::size_t features)
{
    MulticlassModel mc;
    for (std::size_t c = 0; c < classes; ++c) {
        mc.classes.push_back("c" + std::to_string(c));
        BinaryModel m;
        for (std::size_t j = 0; j < features; ++j)
            m.weights.push_back(rng.uniform(-1.0, 1.0));
        m.bias = rng.uniform(-0.5, 0.5);
        m.positive_label = complement_label(mc.classes.back());
        m.negative_label = mc.classes.back();
        mc.models.push_back(m);
    }
    return mc;
}

} // namespace

TEST_CASE("export: binary fixture")
{
    auto source = export_model_source(fixture_model());
    CHECK(source.find("static const float sefr_weights[SEFR_MODEL_COUNT][SEFR_FEATURE_COUNT] = {\n    {1.0f},") !=
          std::string::npos);
    CHECK(source.find("sefr_biases[SEFR_MODEL_COUNT] = {-0.5f};") != std::string::npos);
    auto model = read_exported_model(source);
    CHECK(model.feature_count == 1);
    CHECK(model.class_count == 2);
    CHECK(model.model_count == 1);
    CHECK(model.binary);
    CHECK(model.classes == std::vector<std::string>{"neg", "pos"});

    const std::uint8_t hi = 230, lo = 127;
    CHECK(reference_predict(model, &hi) == 1);
    CHECK(reference_predict(model, &lo) == 0);

    auto fixture = golden_fixture(fixture_model(), {{230}, {127}, {0}, {255}});
    CHECK(fixture.expected == std::vector<std::size_t>{1, 0, 0, 1});
    CHECK(fixture.excluded == 0);
    auto golden = read_exported_golden(export_golden_source(fixture, 1));
    CHECK(golden.count == 4);
    CHECK(golden.inputs == std::vector<std::uint8_t>{230, 127, 0, 255});
}

TEST_CASE("export: zero-weight model predicts the lowest index")
{
    BinaryModel zero{{0.0, 0.0}, 0.0, 0.0, "b", "a"};
    auto model = read_exported_model(export_model_source(zero));
    const std::uint8_t input[2] = {0, 0};
    CHECK(reference_predict(model, input) == 0);
    // Score 0 sits on the boundary, so the record is kept out of the fixture.
    auto fixture = golden_fixture(zero, {{0, 0}, {200, 17}});
    CHECK(fixture.inputs.empty());
    CHECK(fixture.excluded == 2);
    auto golden = read_exported_golden(export_golden_source(fixture, 2));
    CHECK(golden.count == 0);
}

TEST_CASE("export: flash budget")
{
    Rng rng(1);
    auto digits = random_multiclass(rng, 10, 256);
    CHECK(export_footprint(digits) == 10 * 256 * 4 + 10 * 4 + 10 * 3);
    CHECK_NOTHROW(export_model_source(digits));
    CHECK(error_code_of([&] { export_model_source(digits, 1000); }) == ErrorCode::ModelTooLarge);

    MulticlassModel huge;
    for (int c = 0; c < 100; ++c) {
        huge.classes.push_back(std::to_string(c));
        huge.models.push_back(BinaryModel{std::vector<double>(10000, 0.0), 0.0, 0.0, "!", std::to_string(c)});
    }
    CHECK(error_code_of([&] { export_model_source(huge); }) == ErrorCode::ModelTooLarge);
}

TEST_CASE("export: class names are escaped")
{
    BinaryModel m{{0.25}, 0.0, 0.0, "say \"hi\"\\", "tab\there??"};
    auto model = read_exported_model(export_model_source(m));
    CHECK(model.classes == std::vector<std::string>{"tab\there??", "say \"hi\"\\"});
}

TEST_CASE("export: float literals round trip to the nearest float")
{
    Rng rng(3);
    auto mc = random_multiclass(rng, 4, 50);
    auto model = read_exported_model(export_model_source(mc));
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(model.biases[c] == static_cast<float>(mc.models[c].bias));
        for (std::size_t j = 0; j < 50; ++j)
            CHECK(model.weights[c * 50 + j] == static_cast<float>(mc.models[c].weights[j]));
    }
}

TEST_CASE("export: reference predictor agrees with every golden record")
{
    Rng rng(7);
    for (int round = 0; round < 30; ++round) {
        const std::size_t classes = 2 + rng.below(9);
        const std::size_t features = 1 + rng.below(300);
        Model model = round % 3 == 0
                          ? Model(BinaryModel{random_multiclass(rng, 1, features).models[0].weights,
                                              rng.uniform(-0.3, 0.3), 0.0, "p", "n"})
                          : Model(random_multiclass(rng, classes, features));
        auto fixture = golden_fixture(model, random_golden_inputs(features, 200, rng.next()));
        CHECK(fixture.inputs.size() + fixture.excluded == 200);
        auto exported = read_exported_model(export_model_source(model, SIZE_MAX));
        auto golden = read_exported_golden(export_golden_source(fixture, features));
        REQUIRE(golden.count == fixture.inputs.size());
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < golden.count; ++i)
            mismatches += reference_predict(exported, golden.inputs.data() + i * features) != golden.expected[i];
        CHECK(mismatches == 0);
    }
}

TEST_CASE("export: golden inputs from a quantized dataset")
{
    auto blobs = gen_blobs(20, 4, {{0.1, 0.2, 0.3, 0.4}, {0.8, 0.7, 0.9, 0.6}}, 0.1, 9);
    auto model = train_multiclass(blobs.x, blobs.y);
    auto q = quantize_u8(blobs.x, blobs.y);
    auto inputs = golden_inputs_from(q, 4);
    REQUIRE(inputs.size() == 40);
    CHECK(inputs[3] == std::vector<std::uint8_t>(q.values.begin() + 12, q.values.begin() + 16));
    auto fixture = golden_fixture(model, inputs);
    auto exported = read_exported_model(export_model_source(model));
    for (std::size_t i = 0; i < fixture.inputs.size(); ++i)
        CHECK(reference_predict(exported, fixture.inputs[i].data()) == fixture.expected[i]);
    CHECK(error_code_of([&] { golden_inputs_from(q, 5); }) == ErrorCode::DimensionMismatch);
    CHECK(error_code_of([&] { golden_fixture(model, {{1, 2}}); }) == ErrorCode::DimensionMismatch);
}
