#ifndef SACC_RUNNER_HPP
#define SACC_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sacc/arch.hpp"
#include "sacc/cost.hpp"
#include "sacc/engine.hpp"
#include "sacc/tensor.hpp"

namespace sacc {

enum class RunMode {
    Cost,      // analytic model only, no simulation
    Simulate,  // cycle engine, keep outputs and measured counters
    Verify,    // simulate + golden model, compare bit for bit
};

struct RunManifest {
    RunMode mode = RunMode::Cost;
    ArchConfig arch;
    NetworkSpec net;
    std::uint32_t layer_begin = 0;              // simulate layers [begin, end)
    std::uint32_t layer_end = 0xffffffffu;      // clamped to the layer count
    std::uint64_t seed = 1;                     // seeded stimuli
    std::optional<std::string> input_path;      // tensor file instead of seed
    std::vector<std::string> filter_paths;      // one per layer, else seeded
    std::uint32_t threads = 1;
    bool checked = false;
    bool logging = false;
};

struct LayerRun {
    std::string name;
    LayerCost cost;               // analytic view (always present)
    std::uint64_t measured_cycles = 0;       // engine view (simulate/verify)
    std::uint64_t measured_stalls = 0;
    TrafficBreakdown measured_traffic;
    double measured_utilization = 0.0;
    bool verified = false;        // golden comparison ran and matched
    DramTrace trace;
};

struct NetworkRun {
    std::vector<LayerRun> layers;
    NetworkCost cost;             // roll-up of the simulated range
    Tensor output;                // after the last simulated layer's host op
    bool all_verified = false;
};

// Runs the manifest.  In Verify mode a golden mismatch raises Internal with
// the first differing element; missing files raise IoError/MissingPath.
NetworkRun run_network(const RunManifest& manifest);

// Published figures for the full 13-layer reference network at the default
// configuration: total latency 393.0 ms, DRAM traffic 251.5 MiB, 78.1 Gops.
struct PaperComparison {
    struct Row {
        std::string metric;
        double ours = 0.0;
        double published = 0.0;
        double rel_error = 0.0;  // |ours - published| / published
    };
    std::vector<Row> rows;
    bool pass = false;  // every rel_error <= 0.5%
};

// Throws NotDefaultConfig unless the cost came from the reference ArchConfig
// over the full preset network.
PaperComparison compare_to_reference(const ArchConfig& arch, const NetworkCost& cost);

std::string render_comparison(const PaperComparison& cmp);

}  // namespace sacc

#endif
