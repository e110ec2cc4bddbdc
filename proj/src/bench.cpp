#include "sefr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "sefr/error.hpp"
#include "sefr/labels.hpp"
#include "sefr/mac_counter.hpp"
#include "sefr/random.hpp"

namespace sefr {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<std::size_t> stratified_subsample(const LabelVector& y, std::size_t count, std::uint64_t seed)
{
    const auto classes = class_table(y);
    if (count < classes.size() || count > y.size())
        throw Error(ErrorCode::GridOutOfBounds, "cannot draw " + std::to_string(count) + " records keeping all " +
                                                    std::to_string(classes.size()) + " classes from " +
                                                    std::to_string(y.size()));
    std::vector<std::vector<std::size_t>> members(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        members[class_index(classes, y[i])].push_back(i);

    // One record per class first, then the remainder proportionally.
    const std::size_t spare = count - classes.size();
    const std::size_t pool = y.size() - classes.size();
    std::vector<std::size_t> take(classes.size(), 1);
    std::vector<std::pair<std::size_t, std::size_t>> remainders; // (remainder numerator, class)
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const std::size_t avail = members[c].size() - 1;
        const std::size_t share = pool == 0 ? 0 : spare * avail / pool;
        take[c] += share;
        assigned += share;
        remainders.emplace_back(pool == 0 ? 0 : spare * avail % pool, c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < spare; i = (i + 1) % remainders.size()) {
        const auto c = remainders[i].second;
        if (take[c] < members[c].size()) {
            ++take[c];
            ++assigned;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        rng.shuffle(std::span<std::size_t>(members[c]));
        out.insert(out.end(), members[c].begin(), members[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SweepResult> sweep(const FeatureMatrix& x, const LabelVector& y, std::span<const std::size_t> row_grid,
                               std::span<const std::size_t> col_grid, const SweepOptions& options)
{
    if (y.size() != x.rows())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " records");
    if (row_grid.empty() || col_grid.empty())
        throw Error(ErrorCode::GridOutOfBounds, "empty sweep grid");
    if (options.repeats == 0)
        throw Error(ErrorCode::InvalidArgument, "repeats must be at least 1");
    for (auto c : col_grid)
        if (c == 0 || c > x.cols())
            throw Error(ErrorCode::GridOutOfBounds,
                        "column count " + std::to_string(c) + " outside 1.." + std::to_string(x.cols()));
    const auto classes = class_table(y);
    for (auto r : row_grid)
        if (r < classes.size() || r > x.rows())
            throw Error(ErrorCode::GridOutOfBounds, "row count " + std::to_string(r) + " outside " +
                                                        std::to_string(classes.size()) + ".." +
                                                        std::to_string(x.rows()));

    bool binary = options.mode == SweepMode::Binary || (options.mode == SweepMode::Auto && classes.size() == 2);
    std::optional<BinaryLabels> labels;
    if (binary)
        labels = designate_binary(y);

    std::vector<SweepResult> results;
    for (auto rows : row_grid) {
        const auto idx = stratified_subsample(y, rows, options.seed + rows);
        const FeatureMatrix sub = x.select_rows(idx);
        const LabelVector sub_y = select_labels(y, idx);
        for (auto cols : col_grid) {
            const FeatureMatrix data = sub.leading_cols(cols);
            SweepResult r;
            r.rows = rows;
            r.cols = cols;
            std::vector<double> train_times, test_times;
            for (std::size_t rep = 0; rep < options.repeats; ++rep) {
                MacCounter train_counter(rep == 0);
                auto start = Clock::now();
                Model model = labels ? Model(train_binary(data, sub_y, *labels, options.epsilon))
                                     : Model(train_multiclass(data, sub_y, options.epsilon));
                train_times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
                if (rep == 0) {
                    r.mac_count = train_counter.counts().data_pass;
                    r.train_mac_total = train_counter.counts().total;
                    const std::size_t models =
                        labels ? 1 : std::get<MulticlassModel>(model).models.size();
                    r.peak_model_values = models * (cols + 1);
                }

                MacCounter test_counter(rep == 0);
                start = Clock::now();
                auto predicted = predict_all(model, data);
                test_times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
                if (rep == 0)
                    r.test_macs_per_record = test_counter.counts().total / rows;
            }
            r.train_seconds = median(std::move(train_times));
            r.test_seconds = median(std::move(test_times));
            results.push_back(r);
        }
    }
    return results;
}

std::string sweep_to_csv(std::span<const SweepResult> results)
{
    std::string out = "rows,cols,train_seconds,test_seconds,mac_count\n";
    char buf[128];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g,%llu\n", r.rows, r.cols, r.train_seconds, r.test_seconds,
                      static_cast<unsigned long long>(r.mac_count));
        out += buf;
    }
    return out;
}

LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw Error(ErrorCode::LengthMismatch, "fit needs paired samples");
    if (xs.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "fit needs at least 2 samples");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw Error(ErrorCode::InvalidArgument, "fit needs at least 2 distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    return fit;
}

} // namespace sefr
