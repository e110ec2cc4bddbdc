#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sefr/core.hpp"
#include "sefr/feature_matrix.hpp"
#include "sefr/preprocess.hpp"

namespace sefr {

/// How to read a delimited text dataset.
struct DatasetSpec {
    std::string path;
    /// Header name, or a 0-based column index (negative counts from the end).
    /// Unset means every column is a feature and labels stay empty.
    std::optional<std::string> label_column;
    char delimiter = ',';
    bool has_header = true;
    /// Accept files without data rows (result has zero rows).
    bool allow_empty = false;
};

struct Dataset {
    FeatureMatrix x;
    LabelVector y;
    std::vector<std::string> feature_names;
};

Dataset load_csv(const DatasetSpec& spec);
Dataset parse_csv(std::string_view text, const DatasetSpec& spec);

/// Resolves DatasetSpec::label_column against a header (or column count).
std::size_t resolve_label_column(std::string_view column, const std::vector<std::string>& header,
                                 std::size_t column_count);

/// Uniform noise in [-spread, spread] around each class center, clamped to
/// [0, 1]. Records are class-major; class c is labelled std::to_string(c).
Dataset gen_blobs(std::size_t n_per_class, std::size_t dims, const std::vector<std::vector<double>>& centers,
                  double spread, std::uint64_t seed);

inline constexpr std::string_view kModelVersion = "sefr-model/1";

/// A trained model plus the normalization its inputs expect.
struct ModelDocument {
    Model model;
    std::optional<NormalizationParams> normalization;

    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// UTF-8 JSON; numbers use the shortest round-trip decimal form.
std::string save_model(const ModelDocument& doc);
ModelDocument load_model(std::string_view json);

void write_model_file(const std::string& path, const ModelDocument& doc);
ModelDocument read_model_file(const std::string& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct ChecksumEntry {
    std::string sha256;
    std::string filename;
};

/// Parses "sha256  filename" lines; blank lines and '#' comments are skipped.
std::vector<ChecksumEntry> parse_checksum_manifest(std::string_view text);

enum class ChecksumStatus { Match, Mismatch, Unlisted };

ChecksumStatus verify_checksum(const std::vector<ChecksumEntry>& manifest, const std::string& path);

std::string read_text_file(const std::string& path);

} // namespace sefr
