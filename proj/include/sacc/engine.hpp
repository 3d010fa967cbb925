#ifndef SACC_ENGINE_HPP
#define SACC_ENGINE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sacc/arch.hpp"
#include "sacc/schedule.hpp"
#include "sacc/tensor.hpp"

namespace sacc {

// DRAM traffic in 16-bit words, optionally with a per-transfer log.
struct DramRecord {
    std::uint64_t cycle = 0;
    char category = '?';  // 'W' weights, 'I' inputs, 'O' outputs
    std::uint32_t group = 0;
    std::uint32_t tile = 0;
    std::uint32_t channel = 0;     // W/I only
    std::uint32_t filter_row = 0;  // W/I only
    std::uint64_t words = 0;

    bool operator==(const DramRecord&) const = default;
};

struct DramTrace {
    std::uint64_t weight_words = 0;
    std::uint64_t input_words = 0;
    std::uint64_t output_words = 0;
    bool logging = false;
    std::vector<DramRecord> log;

    std::uint64_t total_words() const { return weight_words + input_words + output_words; }
};

enum class CycleKind { Compute, Stall, Flush };

// What one call to step() did; used by the register-level tests and the
// trace tooling.  Values describe convolution unit 0 of the active group.
struct CycleEvent {
    std::uint64_t cycle = 0;  // cycle just executed (0-based)
    CycleKind kind = CycleKind::Compute;
    PassDescriptor pass;            // valid for Compute
    std::uint32_t local_cycle = 0;  // q within the pass, valid for Compute
    bool wrote = false;             // a word was committed to SRAM
    std::uint32_t write_addr = 0;
    std::uint32_t write_bank = 0;
    std::int64_t write_value = 0;   // stored word (bias/partial included)
    std::vector<std::int64_t> acc;  // accumulator chain after the cycle
};

struct EngineOptions {
    std::uint32_t group_begin = 0;           // owned groups [begin, end)
    std::uint32_t group_end = 0xffffffffu;   // clamped to g
    bool checked = false;   // verify SRAM bounds, drain overlap, first-touch
    bool logging = false;   // keep per-transfer DRAM records
};

struct RunResult {
    Tensor output;
    std::uint64_t cycles = 0;        // full-layer timeline, flush included
    std::uint64_t stall_cycles = 0;  // stalls of the owned units only
    DramTrace trace;                 // traffic of the owned units only
    std::uint64_t retained_products = 0;
    double utilization = 0.0;        // retained / (u * n * cycles)
};

// Register-accurate model of the convolution unit array running one layer.
// The public stepping interface exists for the waveform-level tests; most
// callers use run() / run_layer().
class ConvEngine {
public:
    ConvEngine(const ArchConfig& arch, const LayerShape& layer, const Tensor& input,
               const FilterSet& filters, const EngineOptions& opts = {});
    ~ConvEngine();

    ConvEngine(const ConvEngine&) = delete;
    ConvEngine& operator=(const ConvEngine&) = delete;

    bool done() const;
    CycleEvent step();  // advance one cycle
    RunResult run();    // step to completion and collect results

    const Tiling& tiling() const;
    const LayerTimeline& timeline() const;

    // Debug peeks at unit `slot` of the currently active group.
    std::int64_t acc(std::uint32_t slot, std::uint32_t stage) const;
    std::int64_t sram_word(std::uint32_t slot, std::uint32_t bank, std::uint32_t addr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Validates layer/arch/shape compatibility, runs the layer (optionally with
// one worker per filter group spread over `threads` threads) and merges the
// results.  Thread count never changes any output, count or log byte.
RunResult run_layer(const ArchConfig& arch, const LayerShape& layer, const Tensor& input,
                    const FilterSet& filters, const EngineOptions& opts = {},
                    std::uint32_t threads = 1);

// Engine-side compatibility checks shared by run_layer and the CLI: throws
// UnsupportedStride, FilterWidthMismatch, UnsupportedPadding (2z > n-1),
// ShapeMismatch, RowTooWide.
void check_engine_support(const ArchConfig& arch, const LayerShape& layer,
                          const Tensor& input, const FilterSet& filters);

}  // namespace sacc

#endif
