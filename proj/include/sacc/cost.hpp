#ifndef SACC_COST_HPP
#define SACC_COST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sacc/arch.hpp"
#include "sacc/schedule.hpp"

namespace sacc {

struct TrafficBreakdown {
    std::uint64_t weight_bytes = 0;
    std::uint64_t input_bytes = 0;
    std::uint64_t output_bytes = 0;

    std::uint64_t total_bytes() const { return weight_bytes + input_bytes + output_bytes; }
    bool operator==(const TrafficBreakdown&) const = default;
};

// Closed-form per-layer cost.  Cycles count compute only (no stalls, no
// flush); the cycle engine must land exactly on these numbers after
// subtracting its stall and flush cycles.
std::uint64_t analytic_cycles(const ArchConfig& arch, const LayerShape& layer);
TrafficBreakdown analytic_traffic(const ArchConfig& arch, const LayerShape& layer);

// Multiply-accumulates that survive border clipping, i.e. contribute to an
// output inside the map.  Numerator of the utilization figure.
std::uint64_t analytic_retained_products(const ArchConfig& arch, const LayerShape& layer);

struct LayerCost {
    std::string name;
    LayerShape shape;
    Tiling tiling;
    std::uint64_t cycles = 0;       // analytic compute cycles
    std::uint64_t stall_cycles = 0; // from the shared timeline
    double latency_ms = 0.0;        // (cycles + stalls + 1) / clock
    TrafficBreakdown traffic;
    std::uint64_t nominal_macs = 0;
    double gops = 0.0;              // 2 * macs / latency
    double utilization = 0.0;       // retained / (u * n * (cycles + stalls + 1))
};

struct NetworkCost {
    std::vector<LayerCost> layers;
    std::uint64_t cycles = 0;        // sum incl. stalls and flushes
    std::uint64_t stall_cycles = 0;
    double latency_ms = 0.0;
    TrafficBreakdown traffic;
    std::uint64_t nominal_macs = 0;
    double gops = 0.0;
    double utilization = 0.0;        // cycle-weighted
};

LayerCost layer_cost(const ArchConfig& arch, const LayerShape& layer,
                     const std::string& name = "");

// Whole-network roll-up.  A layer the model cannot place (stride, width,
// row size) fails the call; the error message names the layer index.
NetworkCost network_cost(const ArchConfig& arch, const NetworkSpec& net);

// One sweep sample: the varied value plus either a cost or an error string.
struct SweepPoint {
    std::string parameter;
    std::uint64_t value = 0;
    bool ok = false;
    std::string error;  // set when !ok
    NetworkCost cost;   // set when ok
};

// Evaluates the network over each value of one ArchConfig field
// ("sram_depth", "u", "n" or "drain_words_per_cycle").  Throws EmptyRange
// when `values` is empty; individual failing points are recorded, not fatal.
std::vector<SweepPoint> sweep(const ArchConfig& base, const NetworkSpec& net,
                              const std::string& parameter,
                              const std::vector<std::uint64_t>& values);

}  // namespace sacc

#endif
