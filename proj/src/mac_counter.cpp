#include "sefr/mac_counter.hpp"

namespace sefr {

MacCounter::MacCounter(bool enabled) noexcept : enabled_(enabled)
{
    if (enabled_) {
        previous_ = detail::active_mac_counts;
        detail::active_mac_counts = &counts_;
    }
}

MacCounter::~MacCounter()
{
    if (enabled_)
        detail::active_mac_counts = previous_;
}

} // namespace sefr
