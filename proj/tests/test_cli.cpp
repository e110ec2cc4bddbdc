#include "doctest.h"

#include <cmath>
#include <regex>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "sefr/data.hpp"
#include "sefr/export.hpp"
#include "sefr/preprocess.hpp"
#include "support/export_reader.hpp"
#include "temp_dir.hpp"

using namespace sefr;
using sefr::testing::TempDir;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome sefr_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "sefr");
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string slurp(const std::filesystem::path& p)
{
    return read_text_file(p.string());
}

// 10 classes, 256 features, digit c lights up the c-th block of pixels.
std::string digits_csv()
{
    std::string csv;
    for (int j = 0; j < 256; ++j)
        csv += "p" + std::to_string(j) + ",";
    csv += "digit\n";
    for (int c = 0; c < 10; ++c)
        for (int r = 0; r < 6; ++r) {
            for (int j = 0; j < 256; ++j)
                csv += ((j / 25 == c) != ((j + r) % 17 == 0) ? "1," : "0,");
            csv += std::to_string(c) + "\n";
        }
    return csv;
}

std::string without_timings(std::string json)
{
    return std::regex_replace(json, std::regex("\"(train|test)_seconds\": [^,\\n]+"), "");
}

} // namespace

TEST_CASE("cli: train on the two-record fixture")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "x,y\n0,neg\n1,pos\n");
    auto model = (dir.path() / "m.json").string();
    auto r = sefr_cli({"train", "--data", data, "--out", model});
    CHECK(r.code == 0);
    auto doc = read_model_file(model);
    const auto& b = std::get<BinaryModel>(doc.model);
    CHECK(b.positive_label == "pos");
    CHECK(b.weights.size() == 1);
    CHECK(std::abs(b.weights[0] - 1.0 / (1.0 + 1e-7)) <= 1e-16);
    CHECK(b.weights[0] < 1.0);
    CHECK(b.bias == doctest::Approx(-0.5).epsilon(1e-6));
    REQUIRE(doc.normalization.has_value());
    CHECK(doc.normalization->min == std::vector<double>{0.0});
}

TEST_CASE("cli: exit codes")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "x,y\n0,neg\n1,pos\n");
    auto one = dir.write("one.csv", "x,y\n0,a\n1,a\n");
    auto out = (dir.path() / "m.json").string();

    auto missing_col = sefr_cli({"train", "--data", data, "--label-col", "label", "--out", out});
    CHECK(missing_col.code == 2);
    CHECK(missing_col.err.find("label") != std::string::npos);

    auto single = sefr_cli({"train", "--data", one, "--out", out});
    CHECK(single.code == 1);
    CHECK(single.err.find("MissingClass") != std::string::npos);

    CHECK(sefr_cli({}).code == 2);
    CHECK(sefr_cli({"train", "--data", data}).code == 2);
    CHECK(sefr_cli({"train", "--data", data, "--out", out, "--bogus"}).code == 2);
    CHECK(sefr_cli({"train", "--data", data, "--out", out, "--epsilon", "-1"}).code == 2);
    CHECK(sefr_cli({"train", "--data", data, "--out", out, "--multiclass", "--positive", "pos"}).code == 2);
    CHECK(sefr_cli({"train", "--data", data, "--out", out, "--delimiter", "::"}).code == 2);
    CHECK(sefr_cli({"train", "--data", (dir.path() / "absent.csv").string(), "--out", out}).code == 1);
    CHECK(sefr_cli({"--help"}).code == 0);

    auto bad = dir.write("bad.csv", "x,y\n0,a\nzz,b\n");
    auto parse = sefr_cli({"train", "--data", bad, "--out", out});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("line 3") != std::string::npos);
}

TEST_CASE("cli: predict")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "x,y\n0,neg\n1,pos\n");
    auto model = (dir.path() / "m.json").string();
    REQUIRE(sefr_cli({"train", "--data", data, "--out", model, "--epsilon", "0"}).code == 0);

    auto r = sefr_cli({"predict", "--model", model, "--data", dir.write("q.csv", "x\n0.9\n0.2\n")});
    CHECK(r.code == 0);
    CHECK(r.out == "index,score,label\n0,0.4,pos\n1,-0.3,neg\n");

    // Raw-scale inputs go through the model's bundled scaling.
    auto wide = dir.write("wide.csv", "x,y\n10,neg\n20,pos\n");
    REQUIRE(sefr_cli({"train", "--data", wide, "--out", model, "--epsilon", "0"}).code == 0);
    auto scaled = sefr_cli({"predict", "--model", model, "--data", dir.write("q2.csv", "x\n19\n")});
    CHECK(scaled.out == "index,score,label\n0,0.4,pos\n");

    auto labelled = sefr_cli({"predict", "--model", model, "--data", wide, "--label-col", "y"});
    CHECK(labelled.out == "index,score,label\n0,-0.5,neg\n1,0.5,pos\n");

    auto empty = sefr_cli({"predict", "--model", model, "--data", dir.write("empty.csv", "")});
    CHECK(empty.code == 0);
    CHECK(empty.out == "index,score,label\n");

    auto mismatch = sefr_cli({"predict", "--model", model, "--data", dir.write("two.csv", "a,b\n1,2\n")});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("DimensionMismatch") != std::string::npos);

    auto file = (dir.path() / "pred.csv").string();
    CHECK(sefr_cli({"predict", "--model", model, "--data", wide, "--label-col", "-1", "--out", file}).code == 0);
    CHECK(slurp(file) == labelled.out);
}

TEST_CASE("cli: multiclass predict and tab-separated headerless input")
{
    TempDir dir;
    auto data = dir.write("t.tsv", "0.0\tc0\n0.5\tc1\n1.0\tc2\n");
    auto model = (dir.path() / "m.json").string();
    REQUIRE(sefr_cli({"train", "--data", data, "--delimiter", "tab", "--no-header", "--multiclass", "--epsilon", "0",
                      "--out", model})
                .code == 0);
    auto r = sefr_cli({"predict", "--model", model, "--data", dir.write("q.csv", "0.9\n0.1\n0.5\n"), "--no-header"});
    CHECK(r.code == 0);
    CHECK(r.out == "index,score_c0,score_c1,score_c2,label\n"
                   "0,0.65,0,-0.09,c2\n"
                   "1,-0.15,0,0.39,c0\n"
                   "2,0.25,0,0.15,c1\n");
}

TEST_CASE("cli: eval")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "a,b,y\n1.0,0.2,+\n0.8,0.0,+\n0.2,0.8,-\n0.0,1.0,-\n");
    auto r = sefr_cli({"eval", "--data", data, "--k", "2"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["k"] == 2);
    CHECK(j["seed"] == 42);
    CHECK(j["mode"] == "binary");
    CHECK(j["dataset"] == "fx.csv");
    REQUIRE(j["folds"].size() == 2);
    CHECK(j["folds"][0]["test_size"] == 2);
    CHECK(j["folds"][1]["test_size"] == 2);

    CHECK(sefr_cli({"eval", "--data", data, "--k", "5"}).code == 1);
    CHECK(sefr_cli({"eval", "--data", data, "--classifier", "svm"}).code == 2);

    auto again = sefr_cli({"eval", "--data", data, "--k", "2", "--parallel"});
    CHECK(without_timings(again.out) == without_timings(r.out));

    auto per_fold = sefr_cli({"eval", "--data", data, "--k", "2", "--per-fold-norm", "--multiclass"});
    CHECK(per_fold.code == 0);
    CHECK(nlohmann::json::parse(per_fold.out)["normalization"] == "per-fold");
}

TEST_CASE("cli: bench")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "a,b,y\n1.0,0.2,+\n0.8,0.0,+\n0.2,0.8,-\n0.0,1.0,-\n");
    auto r = sefr_cli({"bench", "--data", data, "--rows", "2,4", "--cols", "1,2", "--repeats", "1"});
    REQUIRE(r.code == 0);
    std::vector<std::string> lines;
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "rows,cols,train_seconds,test_seconds,mac_count");
    CHECK(lines[1].rfind("2,1,", 0) == 0);
    CHECK(lines[1].substr(lines[1].rfind(',')) == ",4");
    CHECK(lines[4].substr(lines[4].rfind(',')) == ",16");

    auto oob = sefr_cli({"bench", "--data", data, "--rows", "5"});
    CHECK(oob.code == 1);
    CHECK(oob.err.find("GridOutOfBounds") != std::string::npos);
}

TEST_CASE("cli: quantize")
{
    TempDir dir;
    auto data = dir.write("d.csv", "x,y\n0,a\n5,b\n10,b\n");
    auto out = (dir.path() / "d.sefrq").string();
    auto r = sefr_cli({"quantize", "--data", data, "--out", out});
    REQUIRE(r.code == 0);
    auto q = read_quantized(out);
    CHECK(q.values == std::vector<std::uint8_t>{0, 128, 255});
    CHECK(q.labels == std::vector<std::uint8_t>{0, 1, 1});

    auto model = (dir.path() / "m.json").string();
    REQUIRE(sefr_cli({"train", "--data", dir.write("t.csv", "x,y\n0,a\n20,b\n"), "--out", model}).code == 0);
    REQUIRE(sefr_cli({"quantize", "--data", data, "--model", model, "--out", out}).code == 0);
    CHECK(read_quantized(out).values == std::vector<std::uint8_t>{0, 64, 128});

    CHECK(sefr_cli({"quantize", "--data", data, "--out", out, "--no-normalize"}).code == 1);
    CHECK(sefr_cli({"quantize", "--data", data, "--out", out, "--no-normalize", "--model", model}).code == 2);
}

TEST_CASE("cli: viz")
{
    TempDir dir;
    auto data = dir.write("digits.csv", digits_csv());
    auto model = (dir.path() / "m.json").string();
    REQUIRE(sefr_cli({"train", "--data", data, "--multiclass", "--out", model}).code == 0);
    auto out = dir.path() / "viz";
    auto r = sefr_cli({"viz", "--model", model, "--out", out.string(), "--width", "16", "--height", "16"});
    REQUIRE(r.code == 0);
    for (int c = 0; c < 10; ++c) {
        auto pgm = slurp(out / ("weights_" + std::to_string(c) + ".pgm"));
        CHECK(pgm.rfind("P5\n16 16\n255\n", 0) == 0);
        CHECK(pgm.size() == 13 + 256);
    }
    CHECK(!std::filesystem::exists(out / "weights_10.pgm"));

    auto shape = sefr_cli({"viz", "--model", model, "--out", out.string(), "--width", "6", "--height", "10"});
    CHECK(shape.code == 1);
    CHECK(shape.err.find("ShapeMismatch") != std::string::npos);
}

TEST_CASE("cli: export")
{
    TempDir dir;
    auto data = dir.write("fx.csv", "x,y\n0,neg\n1,pos\n");
    auto model = (dir.path() / "m.json").string();
    REQUIRE(sefr_cli({"train", "--data", data, "--epsilon", "0", "--out", model}).code == 0);
    auto out = dir.path() / "exp";
    auto r = sefr_cli({"export", "--model", model, "--out", out.string(), "--golden-count", "300", "--seed", "5"});
    REQUIRE(r.code == 0);
    auto exported = sefr::testing::read_exported_model(slurp(out / "sefr_model.h"));
    auto golden = sefr::testing::read_exported_golden(slurp(out / "sefr_golden.h"));
    CHECK(exported.binary);
    CHECK(exported.weights == std::vector<float>{1.0f});
    CHECK(exported.biases == std::vector<float>{-0.5f});
    CHECK(golden.count > 250);
    for (std::size_t i = 0; i < golden.count; ++i) {
        CHECK(golden.expected[i] == (golden.inputs[i] >= 128 ? 1u : 0u));
        CHECK(sefr::testing::reference_predict(exported, golden.inputs.data() + i) == golden.expected[i]);
    }

    // Quantized dataset as the golden source.
    auto q = (dir.path() / "q.sefrq").string();
    REQUIRE(sefr_cli({"quantize", "--data", dir.write("in.csv", "x,y\n0,neg\n0.902,pos\n0.1,neg\n1,pos\n"), "--model",
                      model, "--out", q})
                .code == 0);
    REQUIRE(sefr_cli({"export", "--model", model, "--out", out.string(), "--quantized", q}).code == 0);
    golden = sefr::testing::read_exported_golden(slurp(out / "sefr_golden.h"));
    CHECK(golden.inputs == std::vector<std::uint8_t>{0, 230, 26, 255});
    CHECK(golden.expected == std::vector<std::size_t>{0, 1, 0, 1});

    auto big = sefr_cli({"export", "--model", model, "--out", out.string(), "--flash-budget", "8"});
    CHECK(big.code == 1);
    CHECK(big.err.find("ModelTooLarge") != std::string::npos);
}

TEST_CASE("cli: outputs are deterministic")
{
    TempDir dir;
    auto data = dir.write("digits.csv", digits_csv());
    auto a = (dir.path() / "a.json").string();
    auto b = (dir.path() / "b.json").string();
    REQUIRE(sefr_cli({"train", "--data", data, "--multiclass", "--out", a}).code == 0);
    REQUIRE(sefr_cli({"train", "--data", data, "--multiclass", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    REQUIRE(sefr_cli({"export", "--model", a, "--out", (dir.path() / "e1").string()}).code == 0);
    REQUIRE(sefr_cli({"export", "--model", b, "--out", (dir.path() / "e2").string()}).code == 0);
    CHECK(slurp(dir.path() / "e1" / "sefr_model.h") == slurp(dir.path() / "e2" / "sefr_model.h"));
    CHECK(slurp(dir.path() / "e1" / "sefr_golden.h") == slurp(dir.path() / "e2" / "sefr_golden.h"));
    auto e1 = sefr_cli({"eval", "--data", data, "--multiclass", "--k", "3"});
    auto e2 = sefr_cli({"eval", "--data", data, "--multiclass", "--k", "3"});
    CHECK(without_timings(e1.out) == without_timings(e2.out));
}
