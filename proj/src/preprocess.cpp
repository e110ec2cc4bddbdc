#include "sefr/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "sefr/error.hpp"
#include "sefr/labels.hpp"

namespace sefr {

namespace {

constexpr char kMagic[] = {'S', 'E', 'F', 'R', 'Q', '1'};
constexpr double kRangeSlack = 1e-12;

void check_finite(double v, std::size_t i, std::size_t j)
{
    if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidValue,
                    "non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int s = 0; s < 32; s += 8)
        out.push_back(static_cast<std::uint8_t>(v >> s));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint8_t u8()
    {
        need(1);
        return bytes_[pos_++];
    }
    std::uint16_t u16()
    {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return v;
    }
    std::vector<std::uint8_t> take(std::size_t n)
    {
        need(n);
        std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n)
            throw Error(ErrorCode::SchemaError, "quantized container truncated at byte " + std::to_string(pos_));
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace

NormalizationParams fit_minmax(const FeatureMatrix& x)
{
    if (x.rows() == 0)
        throw Error(ErrorCode::EmptyMatrix, "cannot fit normalization on zero records");
    NormalizationParams p;
    p.min.assign(x.cols(), std::numeric_limits<double>::infinity());
    p.max.assign(x.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            check_finite(row[j], i, j);
            p.min[j] = std::min(p.min[j], row[j]);
            p.max[j] = std::max(p.max[j], row[j]);
        }
    }
    return p;
}

void apply_minmax_row(std::span<double> row, const NormalizationParams& params)
{
    if (row.size() != params.feature_count())
        throw Error(ErrorCode::DimensionMismatch, "record has " + std::to_string(row.size()) +
                                                      " features, normalization expects " +
                                                      std::to_string(params.feature_count()));
    for (std::size_t j = 0; j < row.size(); ++j) {
        check_finite(row[j], 0, j);
        const double span = params.max[j] - params.min[j];
        if (!(span > 0.0)) {
            row[j] = 0.0;
            continue;
        }
        row[j] = std::clamp((row[j] - params.min[j]) / span, 0.0, 1.0);
    }
}

FeatureMatrix apply_minmax(const FeatureMatrix& x, const NormalizationParams& params)
{
    if (x.cols() != params.feature_count())
        throw Error(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(x.cols()) +
                                                      " features, normalization expects " +
                                                      std::to_string(params.feature_count()));
    FeatureMatrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        try {
            apply_minmax_row(out.row(i), params);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (row " + std::to_string(i) + ")");
        }
    }
    return out;
}

std::uint8_t quantize_value(double v)
{
    if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack))
        throw Error(ErrorCode::OutOfRange, "value " + std::to_string(v) + " outside [0, 1]");
    const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(scaled);
}

double dequantize_value(std::uint8_t byte) noexcept { return static_cast<double>(byte) / 255.0; }

QuantizedMatrix quantize_u8(const FeatureMatrix& x, const LabelVector& y)
{
    if (y.size() != x.rows())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " records");
    if (x.rows() > std::numeric_limits<std::uint32_t>::max() || x.cols() > std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorCode::OutOfRange, "matrix too large for the quantized container");

    QuantizedMatrix q;
    q.rows = static_cast<std::uint32_t>(x.rows());
    q.cols = static_cast<std::uint32_t>(x.cols());
    q.classes = class_table(y);
    if (q.classes.size() > 256)
        throw Error(ErrorCode::OutOfRange, std::to_string(q.classes.size()) + " classes exceed the byte label range");
    q.values.reserve(x.rows() * x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (double v : x.row(i)) {
            try {
                q.values.push_back(quantize_value(v));
            } catch (const Error& e) {
                throw Error(e.code(), std::string(e.what()) + " at row " + std::to_string(i));
            }
        }
    }
    q.labels.reserve(y.size());
    for (const auto& label : y)
        q.labels.push_back(static_cast<std::uint8_t>(class_index(q.classes, label)));
    return q;
}

std::pair<FeatureMatrix, LabelVector> dequantize(const QuantizedMatrix& q)
{
    std::vector<double> values;
    values.reserve(q.values.size());
    for (auto b : q.values)
        values.push_back(dequantize_value(b));
    LabelVector labels;
    labels.reserve(q.labels.size());
    for (auto b : q.labels) {
        if (b >= q.classes.size())
            throw Error(ErrorCode::SchemaError, "label byte " + std::to_string(b) + " outside the class table");
        labels.push_back(q.classes[b]);
    }
    return {FeatureMatrix(q.rows, q.cols, std::move(values)), std::move(labels)};
}

std::vector<std::uint8_t> encode_quantized(const QuantizedMatrix& q)
{
    if (q.classes.empty() || q.classes.size() > 256)
        throw Error(ErrorCode::OutOfRange, "class table must hold 1..256 entries");
    if (q.values.size() != static_cast<std::size_t>(q.rows) * q.cols || q.labels.size() != q.rows)
        throw Error(ErrorCode::LengthMismatch, "quantized matrix storage is inconsistent with its shape");

    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, q.rows);
    put_u32(out, q.cols);
    out.push_back(static_cast<std::uint8_t>(q.classes.size() & 0xff));
    for (const auto& name : q.classes) {
        if (name.size() > 0xffff)
            throw Error(ErrorCode::OutOfRange, "class id longer than 65535 bytes");
        out.push_back(static_cast<std::uint8_t>(name.size()));
        out.push_back(static_cast<std::uint8_t>(name.size() >> 8));
        out.insert(out.end(), name.begin(), name.end());
    }
    out.insert(out.end(), q.values.begin(), q.values.end());
    out.insert(out.end(), q.labels.begin(), q.labels.end());
    return out;
}

QuantizedMatrix decode_quantized(const std::vector<std::uint8_t>& bytes)
{
    Reader in(bytes);
    auto magic = in.take(sizeof(kMagic));
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic)))
        throw Error(ErrorCode::SchemaError, "missing SEFRQ1 magic");
    QuantizedMatrix q;
    q.rows = in.u32();
    q.cols = in.u32();
    std::size_t class_count = in.u8();
    if (class_count == 0)
        class_count = 256;
    for (std::size_t c = 0; c < class_count; ++c) {
        auto raw = in.take(in.u16());
        q.classes.emplace_back(raw.begin(), raw.end());
    }
    q.values = in.take(static_cast<std::size_t>(q.rows) * q.cols);
    q.labels = in.take(q.rows);
    if (!in.done())
        throw Error(ErrorCode::SchemaError, "trailing bytes after quantized container");
    for (auto b : q.labels)
        if (b >= q.classes.size())
            throw Error(ErrorCode::SchemaError, "label byte " + std::to_string(b) + " outside the class table");
    return q;
}

void write_quantized(const std::string& path, const QuantizedMatrix& q)
{
    auto bytes = encode_quantized(q);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
}

QuantizedMatrix read_quantized(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_quantized(bytes);
}

} // namespace sefr
