#include "sefr/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

namespace sefr {

namespace {

std::optional<double> as_number(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

} // namespace

bool label_less(std::string_view a, std::string_view b)
{
    auto na = as_number(a);
    auto nb = as_number(b);
    if (na && nb && *na != *nb)
        return *na < *nb;
    return a < b;
}

std::vector<Label> class_table(const LabelVector& labels)
{
    std::vector<Label> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end(), [](const Label& a, const Label& b) { return label_less(a, b); });
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

std::size_t class_index(const std::vector<Label>& classes, std::string_view label)
{
    auto it = std::lower_bound(classes.begin(), classes.end(), label,
                               [](const Label& a, std::string_view b) { return label_less(a, b); });
    if (it != classes.end() && *it == label)
        return static_cast<std::size_t>(it - classes.begin());
    return classes.size();
}

std::vector<std::size_t> class_counts(const std::vector<Label>& classes, const LabelVector& labels)
{
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& l : labels) {
        auto k = class_index(classes, l);
        if (k < counts.size())
            ++counts[k];
    }
    return counts;
}

} // namespace sefr
