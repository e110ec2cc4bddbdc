#include "sefr/exact_sum.hpp"

#include <bit>
#include <cassert>
#include <cmath>

namespace sefr {

namespace {

__extension__ using u128 = unsigned __int128;

constexpr int kFractionLimbs = 2; // extra quotient precision below 2^-1074
constexpr int kMinExponent = -1074;

void carry_propagate(std::int64_t* limbs, int n) noexcept
{
    for (int k = 0; k + 1 < n; ++k) {
        const std::int64_t carry = limbs[k] >> 32; // floor division
        limbs[k] -= carry * (std::int64_t{1} << 32);
        limbs[k + 1] += carry;
    }
}

} // namespace

void ExactSum::add(double x) noexcept
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const bool negative = (bits >> 63) != 0;
    const int biased_exp = static_cast<int>((bits >> 52) & 0x7ff);
    std::uint64_t mantissa = bits & ((std::uint64_t{1} << 52) - 1);
    if (biased_exp == 0 && mantissa == 0)
        return;
    assert(biased_exp != 0x7ff && "ExactSum requires finite addends");

    // value = mantissa * 2^(pos - 1074)
    int pos = 0;
    if (biased_exp != 0) {
        mantissa |= std::uint64_t{1} << 52;
        pos = biased_exp - 1;
    }
    const int k = pos >> 5;
    const u128 shifted = static_cast<u128>(mantissa) << (pos & 31);
    const auto c0 = static_cast<std::int64_t>(static_cast<std::uint32_t>(shifted));
    const auto c1 = static_cast<std::int64_t>(static_cast<std::uint32_t>(shifted >> 32));
    const auto c2 = static_cast<std::int64_t>(static_cast<std::uint32_t>(shifted >> 64));
    if (negative) {
        limbs_[k] -= c0;
        limbs_[k + 1] -= c1;
        limbs_[k + 2] -= c2;
    } else {
        limbs_[k] += c0;
        limbs_[k + 1] += c1;
        limbs_[k + 2] += c2;
    }
    if (++pending_ == kNormalizeEvery)
        normalize();
}

ExactSum& ExactSum::operator+=(const ExactSum& other) noexcept
{
    ExactSum rhs = other;
    rhs.normalize();
    normalize();
    for (int k = 0; k < kLimbs; ++k)
        limbs_[k] += rhs.limbs_[k];
    normalize();
    return *this;
}

void ExactSum::normalize() noexcept
{
    carry_propagate(limbs_.data(), kLimbs);
    pending_ = 0;
}

double ExactSum::mean(std::uint64_t count) const noexcept
{
    assert(count >= 1 && count < (std::uint64_t{1} << 32));

    std::array<std::int64_t, kLimbs> work = limbs_;
    carry_propagate(work.data(), kLimbs);
    const bool negative = work[kLimbs - 1] < 0;
    if (negative) {
        for (auto& limb : work)
            limb = -limb;
        carry_propagate(work.data(), kLimbs);
    }

    // Magnitude scaled by 2^64 so the quotient keeps guard bits below the
    // smallest subnormal, then divided by `count` from the top limb down.
    constexpr int n = kLimbs + kFractionLimbs;
    std::array<std::uint32_t, n> quotient{};
    std::uint64_t remainder = 0;
    for (int k = n - 1; k >= 0; --k) {
        const std::uint64_t digit = k >= kFractionLimbs ? static_cast<std::uint64_t>(work[k - kFractionLimbs]) : 0;
        const std::uint64_t current = (remainder << 32) | digit;
        quotient[k] = static_cast<std::uint32_t>(current / count);
        remainder = current % count;
    }

    int top = n - 1;
    while (top >= 0 && quotient[top] == 0)
        --top;
    if (top < 0)
        return 0.0; // below 2^-1138: rounds to zero

    const int high_bit = 32 * top + (31 - std::countl_zero(quotient[top]));
    const int floor_bit = 32 * kFractionLimbs; // bit weight 2^-1074
    int shift = std::max(high_bit - 52, floor_bit);

    auto limb_at = [&](int idx) -> std::uint64_t { return idx < n ? quotient[idx] : 0; };
    const int a = shift >> 5;
    const u128 window = static_cast<u128>(limb_at(a)) | (static_cast<u128>(limb_at(a + 1)) << 32) |
                        (static_cast<u128>(limb_at(a + 2)) << 64);
    std::uint64_t mantissa = static_cast<std::uint64_t>(window >> (shift & 31)) & ((std::uint64_t{1} << 53) - 1);

    const int round_pos = shift - 1;
    const bool round_bit = (quotient[round_pos >> 5] >> (round_pos & 31)) & 1u;
    bool sticky = remainder != 0;
    if (!sticky) {
        const std::uint32_t below_mask = (std::uint32_t{1} << (round_pos & 31)) - 1;
        sticky = (quotient[round_pos >> 5] & below_mask) != 0;
        for (int k = 0; k < (round_pos >> 5) && !sticky; ++k)
            sticky = quotient[k] != 0;
    }
    if (round_bit && (sticky || (mantissa & 1u))) {
        ++mantissa;
        if (mantissa == (std::uint64_t{1} << 53)) {
            mantissa >>= 1;
            ++shift;
        }
    }

    const double magnitude = std::ldexp(static_cast<double>(mantissa), shift - floor_bit + kMinExponent);
    return negative ? -magnitude : magnitude;
}

} // namespace sefr
