#ifndef SACC_SCHEDULE_HPP
#define SACC_SCHEDULE_HPP

#include <cstdint>
#include <vector>

#include "sacc/arch.hpp"

namespace sacc {

// How a layer maps onto the hardware: g filter groups of (up to) u filters,
// each group's ol output rows cut into t tiles of at most r rows so one
// tile's outputs fit in a single SRAM bank (r * ol <= sram_depth).
struct Tiling {
    std::uint32_t g = 0;  // filter groups, ceil(m / u)
    std::uint32_t r = 0;  // output rows per full tile, floor(sram_depth / ol)
    std::uint32_t t = 0;  // tiles per group, ceil(ol / r)

    bool operator==(const Tiling&) const = default;
};

// Throws RowTooWide when one output row does not fit in a bank (r == 0).
Tiling derive_tiling(const ArchConfig& arch, const LayerShape& layer);

// Filter rows j for which output row `out_row` reads an in-range input row,
// i.e. 0 <= out_row*s + j - z < il.  Ascending order.
std::vector<std::uint32_t> valid_filter_rows(std::uint32_t out_row, const LayerShape& layer);

// One pass = streaming one input row through the unit for il cycles while it
// serves (channel, filter_row) for output row `out_row`.
struct PassDescriptor {
    std::uint32_t group = 0;
    std::uint32_t tile = 0;
    std::uint32_t channel = 0;
    std::uint32_t filter_row = 0;   // j
    std::uint32_t row_in_tile = 0;  // rr relative to the tile
    std::uint32_t out_row = 0;      // global output row
    std::uint32_t input_row = 0;    // out_row*s + j - z, always in range

    bool operator==(const PassDescriptor&) const = default;
};

// Full pass order for a layer: group-major, then tile, channel, filter row,
// and finally output row within the tile; passes whose input row falls in
// the padding are omitted.  Throws UnsupportedStride (s != 1) and
// FilterWidthMismatch (fl != n): the unit streams rows only at stride 1 and
// holds exactly one filter row across its n multipliers.
std::vector<PassDescriptor> pass_sequence(const Tiling& tiling, const LayerShape& layer,
                                          std::uint32_t n);

// One schedulable unit of work: a (group, tile) pair with its slice of the
// pass sequence.  Units run back to back on the array and alternate between
// the two SRAM banks.
struct UnitPlan {
    std::uint32_t group = 0;
    std::uint32_t tile = 0;
    std::uint32_t bank = 0;         // unit index % 2
    std::uint32_t row0 = 0;         // first output row of the tile
    std::uint32_t rows = 0;         // output rows in this tile (<= r)
    std::uint32_t active = 0;       // live filters in the group (<= u)
    std::size_t pass_begin = 0;     // [pass_begin, pass_end) into the sequence
    std::size_t pass_end = 0;
    // (channel, filter_row) pairs with no pass in this tile; their weights
    // are still fetched because every tile reloads the full filter slice.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> passless_pairs;
};

std::vector<UnitPlan> build_units(const Tiling& tiling, const LayerShape& layer,
                                  const ArchConfig& arch,
                                  const std::vector<PassDescriptor>& seq);

// Cycle placement of every unit on a shared timeline.  This is the single
// timing authority: the cycle engine replays it step by step and the cost
// model reads stalls straight from it, so both agree by construction.
struct UnitTiming {
    std::uint64_t start = 0;        // first compute cycle
    std::uint64_t end = 0;          // one past the last compute cycle
    std::uint64_t stall = 0;        // idle cycles waiting for the bank drain
    std::uint64_t drain_start = 0;  // first drain cycle (after spill commit)
    std::uint64_t drain_end = 0;    // bank free again at this cycle
};

struct LayerTimeline {
    std::vector<UnitTiming> units;
    std::uint64_t compute_cycles = 0;  // sum of unit lengths
    std::uint64_t stall_cycles = 0;
    std::uint64_t total_cycles = 0;    // compute + stalls + 1 flush cycle
};

LayerTimeline schedule_timeline(const std::vector<UnitPlan>& units, const LayerShape& layer,
                                const ArchConfig& arch);

}  // namespace sacc

#endif
