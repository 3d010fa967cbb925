#include "sacc/schedule.hpp"

#include <algorithm>
#include <string>

namespace sacc {

Tiling derive_tiling(const ArchConfig& arch, const LayerShape& layer) {
    Tiling t;
    t.g = (layer.m + arch.u - 1) / arch.u;
    t.r = arch.sram_depth / layer.ol;
    if (t.r == 0)
        raise(ErrorCode::RowTooWide, "output row of " + std::to_string(layer.ol) +
                                         " words does not fit a " +
                                         std::to_string(arch.sram_depth) + "-word bank");
    t.t = (layer.ol + t.r - 1) / t.r;
    return t;
}

std::vector<std::uint32_t> valid_filter_rows(std::uint32_t out_row, const LayerShape& layer) {
    std::vector<std::uint32_t> js;
    for (std::uint32_t j = 0; j < layer.fh; ++j) {
        const std::int64_t input_row =
            static_cast<std::int64_t>(out_row) * layer.s + j - layer.z;
        if (input_row >= 0 && input_row < layer.il) js.push_back(j);
    }
    return js;
}

std::vector<PassDescriptor> pass_sequence(const Tiling& tiling, const LayerShape& layer,
                                          std::uint32_t n) {
    if (layer.s != 1)
        raise(ErrorCode::UnsupportedStride,
              "the row-streaming dataflow supports s = 1 only, got s = " +
                  std::to_string(layer.s));
    if (layer.fl != n)
        raise(ErrorCode::FilterWidthMismatch,
              "fl = " + std::to_string(layer.fl) + " but each unit has n = " +
                  std::to_string(n) + " multipliers");

    std::vector<PassDescriptor> seq;
    for (std::uint32_t group = 0; group < tiling.g; ++group) {
        for (std::uint32_t tile = 0; tile < tiling.t; ++tile) {
            const std::uint32_t row0 = tile * tiling.r;
            const std::uint32_t rows = std::min(tiling.r, layer.ol - row0);
            for (std::uint32_t c = 0; c < layer.ic; ++c) {
                for (std::uint32_t j = 0; j < layer.fh; ++j) {
                    for (std::uint32_t rr = 0; rr < rows; ++rr) {
                        const std::uint32_t out_row = row0 + rr;
                        const std::int64_t input_row =
                            static_cast<std::int64_t>(out_row) * layer.s + j - layer.z;
                        if (input_row < 0 || input_row >= layer.il) continue;
                        PassDescriptor p;
                        p.group = group;
                        p.tile = tile;
                        p.channel = c;
                        p.filter_row = j;
                        p.row_in_tile = rr;
                        p.out_row = out_row;
                        p.input_row = static_cast<std::uint32_t>(input_row);
                        seq.push_back(p);
                    }
                }
            }
        }
    }
    return seq;
}

std::vector<UnitPlan> build_units(const Tiling& tiling, const LayerShape& layer,
                                  const ArchConfig& arch,
                                  const std::vector<PassDescriptor>& seq) {
    std::vector<UnitPlan> units;
    units.reserve(static_cast<std::size_t>(tiling.g) * tiling.t);
    std::size_t cursor = 0;
    for (std::uint32_t group = 0; group < tiling.g; ++group) {
        for (std::uint32_t tile = 0; tile < tiling.t; ++tile) {
            UnitPlan u;
            u.group = group;
            u.tile = tile;
            u.bank = static_cast<std::uint32_t>(units.size()) % 2;
            u.row0 = tile * tiling.r;
            u.rows = std::min(tiling.r, layer.ol - u.row0);
            u.active = std::min(arch.u, layer.m - group * arch.u);
            u.pass_begin = cursor;
            while (cursor < seq.size() && seq[cursor].group == group &&
                   seq[cursor].tile == tile)
                ++cursor;
            u.pass_end = cursor;

            // Filter rows with no in-range input row anywhere in the tile
            // still have their weights fetched when the tile starts.
            for (std::uint32_t j = 0; j < layer.fh; ++j) {
                bool any = false;
                for (std::uint32_t rr = 0; rr < u.rows && !any; ++rr) {
                    const std::int64_t input_row =
                        static_cast<std::int64_t>(u.row0 + rr) * layer.s + j - layer.z;
                    any = input_row >= 0 && input_row < layer.il;
                }
                if (!any)
                    for (std::uint32_t c = 0; c < layer.ic; ++c)
                        u.passless_pairs.emplace_back(c, j);
            }
            units.push_back(std::move(u));
        }
    }
    return units;
}

LayerTimeline schedule_timeline(const std::vector<UnitPlan>& units, const LayerShape& layer,
                                const ArchConfig& arch) {
    LayerTimeline tl;
    tl.units.resize(units.size());
    std::uint64_t bank_free[2] = {0, 0};
    std::uint64_t now = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const UnitPlan& u = units[i];
        UnitTiming& ut = tl.units[i];
        const std::uint64_t len =
            static_cast<std::uint64_t>(u.pass_end - u.pass_begin) * layer.il;
        ut.start = std::max(now, bank_free[u.bank]);
        ut.stall = ut.start - now;
        ut.end = ut.start + len;
        // With padding, the last output column of every row is committed one
        // cycle after its pass ends; the drain waits for the final commit.
        ut.drain_start = ut.end + (layer.z > 0 ? 1 : 0);
        const std::uint64_t drain_words = static_cast<std::uint64_t>(u.rows) * layer.ol;
        ut.drain_end = ut.drain_start +
                       (drain_words + arch.drain_words_per_cycle - 1) / arch.drain_words_per_cycle;
        bank_free[u.bank] = ut.drain_end;
        now = ut.end;
        tl.compute_cycles += len;
        tl.stall_cycles += ut.stall;
    }
    tl.total_cycles = tl.compute_cycles + tl.stall_cycles + 1;  // +1 flush
    return tl;
}

}  // namespace sacc
