#pragma once

#include <cstdint>

namespace sefr {

/// Multiply-accumulate tallies reported by instrumented core operations.
struct MacCounts {
    /// Every counted operation.
    std::uint64_t total = 0;
    /// Only the per-cell work of full passes over a feature matrix.
    std::uint64_t data_pass = 0;
};

/// Scoped instrumentation toggle. While an enabled counter is alive, core
/// operations running on the constructing thread add their MAC counts to
/// it. Counters nest; the innermost one receives the counts. Disabled (or
/// absent) counters cost one thread-local pointer test per pass.
class MacCounter {
public:
    explicit MacCounter(bool enabled = true) noexcept;
    ~MacCounter();

    MacCounter(const MacCounter&) = delete;
    MacCounter& operator=(const MacCounter&) = delete;

    bool enabled() const noexcept { return enabled_; }
    const MacCounts& counts() const noexcept { return counts_; }
    void reset() noexcept { counts_ = {}; }

private:
    MacCounts counts_;
    MacCounts* previous_ = nullptr;
    bool enabled_;
};

namespace detail {

inline thread_local MacCounts* active_mac_counts = nullptr;

inline void count_macs(std::uint64_t n) noexcept
{
    if (auto* c = active_mac_counts)
        c->total += n;
}

inline void count_pass_macs(std::uint64_t n) noexcept
{
    if (auto* c = active_mac_counts) {
        c->total += n;
        c->data_pass += n;
    }
}

} // namespace detail

} // namespace sefr
