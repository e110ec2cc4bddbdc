#pragma once

#include <array>
#include <cstdint>

namespace sefr {

/// Order-independent accumulator for finite doubles.
///
/// Every addend is folded exactly into a fixed-point integer spanning the
/// whole double range (32-bit chunks held in 64-bit limbs, carries deferred),
/// so the accumulated value is the exact real sum. Results are rounded once,
/// to nearest-even, which makes them a pure function of the multiset of
/// addends: any permutation of the inputs yields the same bits.
class ExactSum {
public:
    /// `x` must be finite.
    void add(double x) noexcept;

    ExactSum& operator+=(const ExactSum& other) noexcept;

    /// The exact sum, correctly rounded.
    double value() const noexcept { return mean(1); }

    /// The exact quotient sum / count, correctly rounded. 1 <= count < 2^32.
    double mean(std::uint64_t count) const noexcept;

private:
    static constexpr int kLimbs = 68;
    static constexpr std::uint32_t kNormalizeEvery = 1u << 30;

    void normalize() noexcept;

    std::array<std::int64_t, kLimbs> limbs_{};
    std::uint32_t pending_ = 0;
};

} // namespace sefr
