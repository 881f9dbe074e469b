#include "ptpdelay/detect/binned.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/net/observe.hpp"

#include <algorithm>
#include <string>

namespace ptpdelay::detect
{

BinnedStream discretize(std::span<const net::Observation> observations, std::int64_t window_end_bin)
{
    BinnedStream out;
    out.packets.reserve(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i)
    {
        const auto& o = observations[i];
        if (i > 0 && o.seen_at < observations[i - 1].seen_at)
        {
            throw InvariantViolation("observations not sorted at index " + std::to_string(i));
        }
        const std::int64_t bin = net::bin_of(o.seen_at);
        if (!out.packets.empty() && out.packets.back().bin == bin)
        {
            ++out.collisions;
            continue;
        }
        out.packets.push_back({bin, o.wire_length, o.direction, i});
    }
    out.end_bin = out.packets.empty() ? 0 : out.packets.back().bin + 1;
    out.end_bin = std::max(out.end_bin, window_end_bin);
    return out;
}

std::vector<std::int64_t> class_positions(const BinnedStream& s, ClassKey key, bool use_direction)
{
    std::vector<std::int64_t> pos;
    for (const auto& p : s.packets)
    {
        if (class_of(p, use_direction) == key)
        {
            pos.push_back(p.bin);
        }
    }
    return pos;
}

} // namespace ptpdelay::detect
