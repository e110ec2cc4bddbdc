#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "sefr/bench.hpp"
#include "sefr/data.hpp"
#include "sefr/error.hpp"
#include "sefr/eval.hpp"
#include "sefr/export.hpp"
#include "sefr/labels.hpp"
#include "sefr/viz.hpp"

namespace sefr::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string data;
    std::string label_col;
    std::string delimiter = ",";
    bool no_header = false;
    std::string out;
    std::string model;
    std::string positive;
    std::size_t k = 10;
    std::uint64_t seed = 42;
    double epsilon = kDefaultEpsilon;
    bool multiclass = false;
    bool per_fold_norm = false;
    bool parallel = false;
    bool no_normalize = false;
    std::string classifier = "sefr";
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    std::size_t repeats = 5;
    std::size_t width = 16;
    std::size_t height = 16;
    std::size_t flash_budget = kDefaultFlashBudget;
    std::string quantized;
    std::size_t golden_count = 64;
};

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

char parse_delimiter(const std::string& d)
{
    if (d == "tab" || d == "\\t")
        return '\t';
    if (d.size() != 1 || d == "\"" || d == "\n" || d == "\r")
        throw UsageError("--delimiter must be a single character or 'tab'");
    return d[0];
}

Dataset load(const Config& cfg, std::optional<std::string> label_col, bool allow_empty = false)
{
    DatasetSpec spec;
    spec.path = cfg.data;
    spec.label_column = std::move(label_col);
    spec.delimiter = parse_delimiter(cfg.delimiter);
    spec.has_header = !cfg.no_header;
    spec.allow_empty = allow_empty;
    try {
        return load_csv(spec);
    } catch (const Error& e) {
        // The only argument the dataset can reject is the label column.
        if (e.code() == ErrorCode::InvalidArgument)
            throw UsageError(e.what());
        throw;
    }
}

std::string labelled_column(const Config& cfg)
{
    return cfg.label_col.empty() ? "-1" : cfg.label_col;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f)
        throw Error(ErrorCode::IoError, "cannot write " + path);
}

// Writes to --out when given, else to the output stream.
void emit(const Config& cfg, std::ostream& out, const std::string& content)
{
    if (cfg.out.empty() || cfg.out == "-")
        out << content;
    else
        write_file(cfg.out, content);
}

void make_directory(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot create directory " + dir + ": " + ec.message());
}

std::string describe(const Model& model)
{
    if (const auto* b = std::get_if<BinaryModel>(&model))
        return "binary model, " + std::to_string(b->feature_count()) + " features, negative '" + b->negative_label +
               "', positive '" + b->positive_label + "'";
    const auto& mc = std::get<MulticlassModel>(model);
    return "one-against-all model, " + std::to_string(mc.feature_count()) + " features, " +
           std::to_string(mc.classes.size()) + " classes";
}

std::optional<Label> positive_of(const Config& cfg)
{
    if (cfg.positive.empty())
        return std::nullopt;
    return cfg.positive;
}

int cmd_train(const Config& cfg, std::ostream& out)
{
    auto ds = load(cfg, labelled_column(cfg));
    ModelDocument doc;
    FeatureMatrix x = std::move(ds.x);
    if (!cfg.no_normalize) {
        doc.normalization = fit_minmax(x);
        x = apply_minmax(x, *doc.normalization);
    }
    if (cfg.multiclass)
        doc.model = train_multiclass(x, ds.y, cfg.epsilon);
    else
        doc.model = train_binary(x, ds.y, designate_binary(ds.y, positive_of(cfg)), cfg.epsilon);
    write_model_file(cfg.out, doc);
    out << "trained " << describe(doc.model) << " on " << x.rows() << " records -> " << cfg.out << "\n";
    return kExitOk;
}

int cmd_predict(const Config& cfg, std::ostream& out)
{
    const auto doc = read_model_file(cfg.model);
    std::optional<std::string> label_col;
    if (!cfg.label_col.empty())
        label_col = cfg.label_col;
    auto ds = load(cfg, label_col, true);

    const auto* binary = std::get_if<BinaryModel>(&doc.model);
    std::string csv = "index";
    if (binary) {
        csv += ",score";
    } else {
        for (const auto& c : std::get<MulticlassModel>(doc.model).classes)
            csv += "," + csv_field("score_" + c);
    }
    csv += ",label\n";

    std::vector<double> row;
    for (std::size_t i = 0; i < ds.x.rows(); ++i) {
        auto src = ds.x.row(i);
        row.assign(src.begin(), src.end());
        if (doc.normalization)
            apply_minmax_row(row, *doc.normalization);
        csv += std::to_string(i);
        if (binary) {
            csv += "," + format_number(decision_score(*binary, row));
            csv += "," + csv_field(predict_binary(*binary, row));
        } else {
            const auto& mc = std::get<MulticlassModel>(doc.model);
            const auto scores = multiclass_scores(mc, row);
            for (double s : scores)
                csv += "," + format_number(s);
            csv += "," + csv_field(predict_multiclass(mc, row));
        }
        csv += "\n";
    }
    emit(cfg, out, csv);
    return kExitOk;
}

Classifier classifier_of(const std::string& name)
{
    if (name == "sefr")
        return Classifier::Sefr;
    if (name == "nearest-centroid")
        return Classifier::NearestCentroid;
    return Classifier::Majority;
}

int cmd_eval(const Config& cfg, std::ostream& out)
{
    auto ds = load(cfg, labelled_column(cfg));
    CvOptions options;
    options.k = cfg.k;
    options.seed = cfg.seed;
    options.epsilon = cfg.epsilon;
    options.mode = cfg.multiclass ? CvMode::Multiclass : CvMode::Binary;
    options.normalization = cfg.per_fold_norm ? CvNormalization::PerFold : CvNormalization::Full;
    options.classifier = classifier_of(cfg.classifier);
    options.positive_label = positive_of(cfg);
    options.parallel = cfg.parallel;
    options.dataset = fs::path(cfg.data).filename().string();
    emit(cfg, out, report_to_json(cross_validate(ds.x, ds.y, options)));
    return kExitOk;
}

std::vector<std::size_t> default_grid(std::size_t max, std::size_t min)
{
    std::vector<std::size_t> grid;
    for (std::size_t q = 1; q <= 4; ++q)
        grid.push_back(std::max(min, max * q / 4));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

int cmd_bench(const Config& cfg, std::ostream& out)
{
    auto ds = load(cfg, labelled_column(cfg));
    FeatureMatrix x = apply_minmax(ds.x, fit_minmax(ds.x));
    const auto rows = cfg.rows.empty() ? default_grid(x.rows(), class_table(ds.y).size()) : cfg.rows;
    const auto cols = cfg.cols.empty() ? default_grid(x.cols(), 1) : cfg.cols;
    SweepOptions options;
    options.repeats = cfg.repeats;
    options.seed = cfg.seed;
    options.epsilon = cfg.epsilon;
    options.mode = cfg.multiclass ? SweepMode::Multiclass : SweepMode::Auto;
    emit(cfg, out, sweep_to_csv(sweep(x, ds.y, rows, cols, options)));
    return kExitOk;
}

int cmd_quantize(const Config& cfg, std::ostream& out)
{
    auto ds = load(cfg, labelled_column(cfg));
    std::optional<NormalizationParams> params;
    if (!cfg.model.empty())
        params = read_model_file(cfg.model).normalization;
    else if (!cfg.no_normalize)
        params = fit_minmax(ds.x);
    const FeatureMatrix x = params ? apply_minmax(ds.x, *params) : ds.x;
    const auto q = quantize_u8(x, ds.y);
    write_quantized(cfg.out, q);
    out << "quantized " << q.rows << " records x " << q.cols << " features, " << q.classes.size() << " classes -> "
        << cfg.out << "\n";
    return kExitOk;
}

int cmd_viz(const Config& cfg, std::ostream& out)
{
    const auto doc = read_model_file(cfg.model);
    const auto images = weight_images(doc.model, cfg.width, cfg.height);
    make_directory(cfg.out);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto path = (fs::path(cfg.out) / ("weights_" + std::to_string(i) + ".pgm")).string();
        write_file(path, images[i].pgm);
        out << path << "\t" << images[i].label << "\n";
    }
    return kExitOk;
}

int cmd_export(const Config& cfg, std::ostream& out)
{
    const auto doc = read_model_file(cfg.model);
    const auto features = feature_count(doc.model);
    const auto model_source = export_model_source(doc.model, cfg.flash_budget);
    const auto inputs = cfg.quantized.empty() ? random_golden_inputs(features, cfg.golden_count, cfg.seed)
                                              : golden_inputs_from(read_quantized(cfg.quantized), features);
    const auto fixture = golden_fixture(doc.model, inputs);
    make_directory(cfg.out);
    const auto model_path = (fs::path(cfg.out) / "sefr_model.h").string();
    const auto golden_path = (fs::path(cfg.out) / "sefr_golden.h").string();
    write_file(model_path, model_source);
    write_file(golden_path, export_golden_source(fixture, features));
    out << "model: " << model_path << " (" << export_footprint(doc.model) << " of " << cfg.flash_budget
        << " bytes)\n";
    out << "golden: " << golden_path << " (" << fixture.inputs.size() << " records, " << fixture.excluded
        << " within the " << format_number(kGoldenMargin) << " margin left out)\n";
    return kExitOk;
}

void add_data_options(CLI::App* sub, Config& cfg, bool label_required)
{
    sub->add_option("--data", cfg.data, "Delimited dataset file")->required();
    sub->add_option("--label-col", cfg.label_col,
                    label_required ? "Label column: header name or index, negative from the end (default: last)"
                                   : "Label column to drop before scoring (default: none)");
    sub->add_option("--delimiter", cfg.delimiter, "Field delimiter, or 'tab'")->capture_default_str();
    sub->add_flag("--no-header", cfg.no_header, "First line is data");
}

void add_epsilon(CLI::App* sub, Config& cfg)
{
    sub->add_option("--epsilon", cfg.epsilon, "Weight denominator guard")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Config cfg;
    CLI::App app{"SEFR linear classifier"};
    app.name(args.empty() ? "sefr" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Fit a model and write it as JSON");
    add_data_options(train, cfg, true);
    train->add_option("--out", cfg.out, "Model file")->required();
    add_epsilon(train, cfg);
    train->add_flag("--multiclass", cfg.multiclass, "One-against-all over every class");
    train->add_option("--positive", cfg.positive, "Positive label of a binary model (default: the greater one)");
    train->add_flag("--no-normalize", cfg.no_normalize, "Train on the features as given");

    auto* predict = app.add_subcommand("predict", "Score records with a saved model");
    add_data_options(predict, cfg, false);
    predict->add_option("--model", cfg.model, "Model file")->required();
    predict->add_option("--out", cfg.out, "Predictions CSV (default: stdout)");

    auto* eval = app.add_subcommand("eval", "Stratified k-fold cross-validation");
    add_data_options(eval, cfg, true);
    eval->add_option("--out", cfg.out, "Report JSON (default: stdout)");
    eval->add_option("--k", cfg.k, "Folds")->capture_default_str();
    eval->add_option("--seed", cfg.seed, "Fold seed")->capture_default_str();
    add_epsilon(eval, cfg);
    eval->add_flag("--multiclass", cfg.multiclass, "One-against-all over every class");
    eval->add_option("--positive", cfg.positive, "Positive label in binary mode");
    eval->add_flag("--per-fold-norm", cfg.per_fold_norm, "Fit min-max scaling on each training fold only");
    eval->add_flag("--parallel", cfg.parallel, "Evaluate folds concurrently");
    eval->add_option("--classifier", cfg.classifier, "sefr, nearest-centroid or majority")
        ->check(CLI::IsMember({"sefr", "nearest-centroid", "majority"}))
        ->capture_default_str();

    auto* bench = app.add_subcommand("bench", "Timing and MAC sweep over rows x columns");
    add_data_options(bench, cfg, true);
    bench->add_option("--out", cfg.out, "Sweep CSV (default: stdout)");
    bench->add_option("--rows", cfg.rows, "Row counts, comma separated (default: quarters)")->delimiter(',');
    bench->add_option("--cols", cfg.cols, "Column counts, comma separated (default: quarters)")->delimiter(',');
    bench->add_option("--repeats", cfg.repeats, "Timing repeats per cell")->capture_default_str();
    bench->add_option("--seed", cfg.seed, "Subsample seed")->capture_default_str();
    add_epsilon(bench, cfg);
    bench->add_flag("--multiclass", cfg.multiclass, "One-against-all even on 2-class data");

    auto* quantize = app.add_subcommand("quantize", "Write a min-max scaled dataset as unsigned bytes");
    add_data_options(quantize, cfg, true);
    quantize->add_option("--out", cfg.out, "Quantized file")->required();
    auto* scale_from = quantize->add_option("--model", cfg.model, "Take the scaling from this model file");
    quantize->add_flag("--no-normalize", cfg.no_normalize, "Features are already in [0, 1]")->excludes(scale_from);

    auto* viz = app.add_subcommand("viz", "Render weights as grayscale PGM images");
    viz->add_option("--model", cfg.model, "Model file")->required();
    viz->add_option("--out", cfg.out, "Output directory")->required();
    viz->add_option("--width", cfg.width, "Image width")->capture_default_str();
    viz->add_option("--height", cfg.height, "Image height")->capture_default_str();

    auto* exp = app.add_subcommand("export", "Emit C headers for a microcontroller build");
    exp->add_option("--model", cfg.model, "Model file")->required();
    exp->add_option("--out", cfg.out, "Output directory")->required();
    exp->add_option("--flash-budget", cfg.flash_budget, "Bytes available for model constants")
        ->capture_default_str();
    exp->add_option("--quantized", cfg.quantized, "Golden inputs from this quantized dataset");
    exp->add_option("--golden-count", cfg.golden_count, "Random golden records when no dataset is given")
        ->capture_default_str();
    exp->add_option("--seed", cfg.seed, "Random golden seed")->capture_default_str();

    std::vector<const char*> argv;
    argv.push_back(args.empty() ? "sefr" : args[0].c_str());
    for (std::size_t i = 1; i < args.size(); ++i)
        argv.push_back(args[i].c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!cfg.positive.empty() && cfg.multiclass)
            throw UsageError("--positive applies to binary models only");
        if (train->parsed())
            return cmd_train(cfg, out);
        if (predict->parsed())
            return cmd_predict(cfg, out);
        if (eval->parsed())
            return cmd_eval(cfg, out);
        if (bench->parsed())
            return cmd_bench(cfg, out);
        if (quantize->parsed())
            return cmd_quantize(cfg, out);
        if (viz->parsed())
            return cmd_viz(cfg, out);
        return cmd_export(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
}

} // namespace sefr::cli
