#include "sefr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <memory>

#include <openssl/evp.h>

#include "json.hpp"

#include "sefr/error.hpp"
#include "sefr/random.hpp"

namespace sefr {

namespace {

using json = nlohmann::json;

std::string location(std::size_t line, std::size_t column)
{
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string_view trim(std::string_view s, char delimiter)
{
    auto blank = [delimiter](char c) { return (c == ' ' || c == '\t') && c != delimiter; };
    while (!s.empty() && blank(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && blank(s.back()))
        s.remove_suffix(1);
    return s;
}

/// Splits one record; double-quoted fields may contain the delimiter and
/// "" escapes.
std::vector<std::string> split_record(std::string_view line, char delimiter, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && trim(current, delimiter).empty()) {
            quoted = true;
            was_quoted = true;
            current.clear();
        } else if (c == delimiter) {
            fields.push_back(was_quoted ? current : std::string(trim(current, delimiter)));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted)
        throw Error(ErrorCode::ParseError, "unterminated quoted field on line " + std::to_string(line_no));
    fields.push_back(was_quoted ? current : std::string(trim(current, delimiter)));
    return fields;
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column)
{
    std::string_view digits = cell;
    if (!digits.empty() && digits.front() == '+')
        digits.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
        throw Error(ErrorCode::ParseError, "'" + std::string(cell) + "' is not a decimal number at " +
                                               location(line, column));
    if (!std::isfinite(v))
        throw Error(ErrorCode::ParseError, "non-finite value '" + std::string(cell) + "' at " + location(line, column));
    return v;
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Error(ErrorCode::SchemaError, what);
}

std::vector<double> number_array(const json& j, const char* field)
{
    require(j.is_array(), std::string(field) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        require(v.is_number(), std::string(field) + " must hold numbers");
        const double d = v.get<double>();
        require(std::isfinite(d), std::string(field) + " must hold finite numbers");
        out.push_back(d);
    }
    return out;
}

double finite_number(const json& j, const char* field)
{
    require(j.contains(field) && j.at(field).is_number(), std::string("missing numeric field '") + field + "'");
    const double d = j.at(field).get<double>();
    require(std::isfinite(d), std::string("field '") + field + "' must be finite");
    return d;
}

std::string string_field(const json& j, const char* field)
{
    require(j.contains(field) && j.at(field).is_string(), std::string("missing string field '") + field + "'");
    return j.at(field).get<std::string>();
}

} // namespace

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t resolve_label_column(std::string_view column, const std::vector<std::string>& header,
                                 std::size_t column_count)
{
    auto named = std::find(header.begin(), header.end(), column);
    if (named != header.end())
        return static_cast<std::size_t>(named - header.begin());
    long index = 0;
    auto [ptr, ec] = std::from_chars(column.data(), column.data() + column.size(), index);
    if (!column.empty() && ec == std::errc() && ptr == column.data() + column.size()) {
        const long count = static_cast<long>(column_count);
        const long resolved = index < 0 ? count + index : index;
        if (resolved >= 0 && resolved < count)
            return static_cast<std::size_t>(resolved);
    }
    throw Error(ErrorCode::InvalidArgument, "label column '" + std::string(column) + "' not found");
}

Dataset parse_csv(std::string_view text, const DatasetSpec& spec)
{
    if (text.starts_with("\xEF\xBB\xBF"))
        text.remove_prefix(3);

    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (trim(line, '\0').empty())
            continue;
        lines.emplace_back(line_no, line);
    }

    Dataset out;
    std::vector<std::string> header;
    std::size_t first = 0;
    std::size_t width = 0;
    if (spec.has_header && !lines.empty()) {
        header = split_record(lines[0].second, spec.delimiter, lines[0].first);
        width = header.size();
        first = 1;
    } else if (!lines.empty()) {
        width = split_record(lines[0].second, spec.delimiter, lines[0].first).size();
    }

    if (lines.size() == first) {
        if (!spec.allow_empty)
            throw Error(ErrorCode::EmptyFile, spec.path.empty() ? "no data rows" : spec.path + " has no data rows");
    }

    std::optional<std::size_t> label_at;
    if (spec.label_column && width > 0)
        label_at = resolve_label_column(*spec.label_column, header, width);

    for (std::size_t c = 0; c < width; ++c)
        if (!label_at || c != *label_at)
            out.feature_names.push_back(c < header.size() ? header[c] : "f" + std::to_string(c));

    const std::size_t cols = out.feature_names.size();
    std::vector<double> values;
    values.reserve((lines.size() - first) * cols);
    for (std::size_t r = first; r < lines.size(); ++r) {
        const auto [number, line] = lines[r];
        auto fields = split_record(line, spec.delimiter, number);
        if (fields.size() != width)
            throw Error(ErrorCode::RaggedRows, "line " + std::to_string(number) + " has " +
                                                   std::to_string(fields.size()) + " fields, expected " +
                                                   std::to_string(width));
        for (std::size_t c = 0; c < width; ++c) {
            if (label_at && c == *label_at)
                out.y.push_back(fields[c]);
            else
                values.push_back(parse_cell(fields[c], number, c + 1));
        }
    }
    out.x = FeatureMatrix(lines.size() - first, cols, std::move(values));
    return out;
}

Dataset load_csv(const DatasetSpec& spec)
{
    if (!std::filesystem::exists(spec.path))
        throw Error(ErrorCode::IoError, spec.path + " does not exist");
    const auto text = read_text_file(spec.path);
    if (text.empty() && !spec.allow_empty)
        throw Error(ErrorCode::EmptyFile, spec.path + " is empty");
    try {
        return parse_csv(text, spec);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::RaggedRows)
            throw Error(e.code(), spec.path + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
        throw;
    }
}

Dataset gen_blobs(std::size_t n_per_class, std::size_t dims, const std::vector<std::vector<double>>& centers,
                  double spread, std::uint64_t seed)
{
    if (!(spread >= 0.0) || !std::isfinite(spread))
        throw Error(ErrorCode::InvalidArgument, "spread must be finite and >= 0");
    if (centers.size() < 1 || dims == 0)
        throw Error(ErrorCode::InvalidArgument, "need at least one center and one dimension");
    std::set<std::vector<double>> distinct;
    for (const auto& c : centers) {
        if (c.size() != dims)
            throw Error(ErrorCode::DimensionMismatch, "center has " + std::to_string(c.size()) + " coordinates, expected " +
                                                          std::to_string(dims));
        for (double v : c)
            if (!(v >= 0.0 && v <= 1.0))
                throw Error(ErrorCode::OutOfRange, "center coordinates must lie in [0, 1]");
        if (!distinct.insert(c).second)
            throw Error(ErrorCode::InvalidArgument, "centers must be distinct");
    }

    Rng rng(seed);
    Dataset out;
    std::vector<double> values;
    values.reserve(centers.size() * n_per_class * dims);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t j = 0; j < dims; ++j) {
                const double noise = spread == 0.0 ? 0.0 : rng.uniform(-spread, spread);
                values.push_back(std::clamp(centers[c][j] + noise, 0.0, 1.0));
            }
            out.y.push_back(std::to_string(c));
        }
    }
    out.x = FeatureMatrix(centers.size() * n_per_class, dims, std::move(values));
    for (std::size_t j = 0; j < dims; ++j)
        out.feature_names.push_back("f" + std::to_string(j));
    return out;
}

std::string save_model(const ModelDocument& doc)
{
    json j;
    j["version"] = kModelVersion;
    if (const auto* b = std::get_if<BinaryModel>(&doc.model)) {
        j["kind"] = "binary";
        j["feature_count"] = b->feature_count();
        j["epsilon"] = b->epsilon;
        j["classes"] = {b->negative_label, b->positive_label};
        j["negative_label"] = b->negative_label;
        j["positive_label"] = b->positive_label;
        j["weights"] = b->weights;
        j["bias"] = b->bias;
    } else {
        const auto& m = std::get<MulticlassModel>(doc.model);
        j["kind"] = "multiclass";
        j["feature_count"] = m.feature_count();
        j["epsilon"] = m.models.empty() ? 0.0 : m.models.front().epsilon;
        j["classes"] = m.classes;
        json weights = json::array();
        json biases = json::array();
        for (const auto& member : m.models) {
            weights.push_back(member.weights);
            biases.push_back(member.bias);
        }
        j["weights"] = std::move(weights);
        j["biases"] = std::move(biases);
    }
    if (doc.normalization) {
        j["normalization"] = {{"min", doc.normalization->min}, {"max", doc.normalization->max}};
    } else {
        j["normalization"] = nullptr;
    }
    return j.dump(2) + "\n";
}

ModelDocument load_model(std::string_view text)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("model document is not valid JSON: ") + e.what());
    }
    require(j.is_object(), "model document must be a JSON object");
    const auto version = string_field(j, "version");
    if (version != kModelVersion)
        throw Error(ErrorCode::VersionMismatch,
                    "model version '" + version + "', expected '" + std::string(kModelVersion) + "'");

    const auto kind = string_field(j, "kind");
    require(j.contains("feature_count") && j.at("feature_count").is_number_unsigned(), "missing 'feature_count'");
    const auto features = j.at("feature_count").get<std::size_t>();
    require(features >= 1, "feature_count must be >= 1");
    const double epsilon = finite_number(j, "epsilon");
    require(epsilon >= 0.0, "epsilon must be >= 0");
    require(j.contains("classes") && j.at("classes").is_array(), "missing 'classes'");
    std::vector<Label> classes;
    for (const auto& c : j.at("classes")) {
        require(c.is_string(), "class ids must be strings");
        classes.push_back(c.get<std::string>());
    }
    require(j.contains("weights"), "missing 'weights'");

    ModelDocument doc;
    if (kind == "binary") {
        BinaryModel b;
        b.epsilon = epsilon;
        b.negative_label = string_field(j, "negative_label");
        b.positive_label = string_field(j, "positive_label");
        require(b.negative_label != b.positive_label, "binary labels must differ");
        require(classes == std::vector<Label>{b.negative_label, b.positive_label},
                "binary class table must be [negative_label, positive_label]");
        b.weights = number_array(j.at("weights"), "weights");
        require(b.weights.size() == features, "weights length differs from feature_count");
        b.bias = finite_number(j, "bias");
        doc.model = std::move(b);
    } else if (kind == "multiclass") {
        require(classes.size() >= 2, "multiclass model needs at least two classes");
        require(std::set<Label>(classes.begin(), classes.end()).size() == classes.size(), "class ids must be distinct");
        const auto& weights = j.at("weights");
        require(weights.is_array() && weights.size() == classes.size(), "need one weight array per class");
        require(j.contains("biases"), "missing 'biases'");
        const auto biases = number_array(j.at("biases"), "biases");
        require(biases.size() == classes.size(), "need one bias per class");
        MulticlassModel m;
        m.classes = classes;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            BinaryModel member;
            member.weights = number_array(weights[c], "weights");
            require(member.weights.size() == features, "weights length differs from feature_count");
            member.bias = biases[c];
            member.epsilon = epsilon;
            member.negative_label = classes[c];
            member.positive_label = complement_label(classes[c]);
            m.models.push_back(std::move(member));
        }
        doc.model = std::move(m);
    } else {
        throw Error(ErrorCode::SchemaError, "unknown model kind '" + kind + "'");
    }

    if (j.contains("normalization") && !j.at("normalization").is_null()) {
        const auto& n = j.at("normalization");
        require(n.is_object() && n.contains("min") && n.contains("max"), "normalization needs 'min' and 'max'");
        NormalizationParams p{number_array(n.at("min"), "normalization.min"), number_array(n.at("max"), "normalization.max")};
        require(p.min.size() == features && p.max.size() == features, "normalization length differs from feature_count");
        for (std::size_t k = 0; k < features; ++k)
            require(p.min[k] <= p.max[k], "normalization min exceeds max");
        doc.normalization = std::move(p);
    }
    return doc;
}

void write_model_file(const std::string& path, const ModelDocument& doc)
{
    std::ofstream out(path, std::ios::binary);
    out << save_model(doc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
}

ModelDocument read_model_file(const std::string& path) { return load_model(read_text_file(path)); }

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 unavailable");
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < length; ++k) {
        out.push_back(hex[digest[k] >> 4]);
        out.push_back(hex[digest[k] & 0xf]);
    }
    return out;
}

std::vector<ChecksumEntry> parse_checksum_manifest(std::string_view text)
{
    std::vector<ChecksumEntry> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string_view view = trim(line, '\0');
        if (view.empty() || view.front() == '#')
            continue;
        const auto gap = view.find_first_of(" \t");
        if (gap != 64)
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(number) + " lacks a 64-digit digest");
        std::string digest(view.substr(0, gap));
        std::transform(digest.begin(), digest.end(), digest.begin(), [](unsigned char c) { return std::tolower(c); });
        if (digest.find_first_not_of("0123456789abcdef") != std::string::npos)
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(number) + " has a non-hex digest");
        auto name = trim(view.substr(gap), '\0');
        if (!name.empty() && name.front() == '*')
            name.remove_prefix(1);
        if (name.empty())
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(number) + " lacks a filename");
        out.push_back({std::move(digest), std::string(name)});
    }
    return out;
}

ChecksumStatus verify_checksum(const std::vector<ChecksumEntry>& manifest, const std::string& path)
{
    const auto name = std::filesystem::path(path).filename().string();
    auto it = std::find_if(manifest.begin(), manifest.end(), [&](const ChecksumEntry& e) { return e.filename == name; });
    if (it == manifest.end())
        return ChecksumStatus::Unlisted;
    return sha256_file(path) == it->sha256 ? ChecksumStatus::Match : ChecksumStatus::Mismatch;
}

} // namespace sefr
