#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include <mpfr.h>

#include "sefr/exact_sum.hpp"
#include "sefr/random.hpp"

using sefr::ExactSum;

namespace {

// Independent oracle: exact big-float accumulation, one correctly rounded
// division into 53 bits.
double mpfr_mean(const std::vector<double>& xs, unsigned long count)
{
    mpfr_t acc, out;
    mpfr_init2(acc, 4400);
    mpfr_init2(out, 53);
    mpfr_set_zero(acc, 1);
    for (double x : xs)
        mpfr_add_d(acc, acc, x, MPFR_RNDN); // exact at this precision
    mpfr_div_ui(out, acc, count, MPFR_RNDN);
    double r = mpfr_get_d(out, MPFR_RNDN);
    mpfr_clear(acc);
    mpfr_clear(out);
    return r;
}

ExactSum sum_of(const std::vector<double>& xs)
{
    ExactSum s;
    for (double x : xs)
        s.add(x);
    return s;
}

} // namespace

TEST_CASE("exact sum: rounding and cancellation")
{
    CHECK(sum_of({0.1, 0.2, 0.3}).value() == 0.6);
    CHECK(sum_of({1e30, 1e-30, -1e30}).value() == 1e-30);
    CHECK(sum_of({}).value() == 0.0);
    CHECK(sum_of({1.0, -1.0}).value() == 0.0);
    CHECK(sum_of({-2.5, 0.5}).value() == -2.0);
    CHECK(sum_of({std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(), 3.0}).value() == 3.0);
}

TEST_CASE("exact sum: mean is the correctly rounded quotient")
{
    std::vector<double> seven(7, 0.1);
    CHECK(sum_of(seven).mean(7) == 0.1);
    CHECK(sum_of({1.0, 0.8}).mean(2) == 0.9);
    CHECK(sum_of({1.0, 2.0}).mean(3) == 1.0);
    CHECK(sum_of({1.0}).mean(3) == 1.0 / 3.0);
    CHECK(sum_of({-1.0}).mean(3) == -1.0 / 3.0);
}

TEST_CASE("exact sum: subnormal range")
{
    const double tiny = std::numeric_limits<double>::denorm_min();
    CHECK(sum_of({tiny, tiny}).value() == 2 * tiny);
    // 3 * 2^-1074 / 2 = 1.5 ulp -> ties to even -> 2 ulp
    CHECK(sum_of({tiny, tiny, tiny}).mean(2) == 2 * tiny);
    // 2^-1074 / 3 rounds to zero
    CHECK(sum_of({tiny}).mean(3) == 0.0);
    CHECK(sum_of({tiny, tiny}).mean(3) == tiny);
}

TEST_CASE("exact sum: matches high-precision oracle on random data")
{
    sefr::Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 1 + rng.below(200);
        std::vector<double> xs;
        for (std::uint64_t i = 0; i < n; ++i) {
            double mag = std::ldexp(rng.uniform01(), static_cast<int>(rng.below(120)) - 60);
            xs.push_back(rng.below(3) == 0 ? -mag : mag);
        }
        const auto count = 1 + rng.below(1000);
        const auto s = sum_of(xs);
        CHECK(s.mean(count) == mpfr_mean(xs, static_cast<unsigned long>(count)));
        CHECK(s.value() == mpfr_mean(xs, 1));
    }
}

TEST_CASE("exact sum: permutation invariance and merging")
{
    sefr::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs;
        for (int i = 0; i < 64; ++i)
            xs.push_back(rng.uniform(-1.0, 1.0) * std::ldexp(1.0, static_cast<int>(rng.below(40)) - 20));
        const double forward = sum_of(xs).value();
        rng.shuffle(std::span<double>(xs));
        CHECK(sum_of(xs).value() == forward);

        ExactSum left = sum_of({xs.begin(), xs.begin() + 20});
        left += sum_of({xs.begin() + 20, xs.end()});
        CHECK(left.value() == forward);
    }
}
