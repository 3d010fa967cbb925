#include "sacc/cost.hpp"

#include <string>

namespace sacc {

namespace {

// Sum over all output rows of the number of filter rows with an in-range
// input row.  Multiplying by il gives the per-(group, channel) cycle count.
std::uint64_t sum_valid_filter_rows(const LayerShape& layer) {
    std::uint64_t sum = 0;
    for (std::uint32_t row = 0; row < layer.ol; ++row)
        sum += valid_filter_rows(row, layer).size();
    return sum;
}

}  // namespace

std::uint64_t analytic_cycles(const ArchConfig& arch, const LayerShape& layer) {
    const Tiling tiling = derive_tiling(arch, layer);
    return static_cast<std::uint64_t>(tiling.g) * layer.ic * layer.il *
           sum_valid_filter_rows(layer);
}

TrafficBreakdown analytic_traffic(const ArchConfig& arch, const LayerShape& layer) {
    const Tiling tiling = derive_tiling(arch, layer);
    const std::uint64_t wb = arch.word_bytes();
    TrafficBreakdown t;
    // Every tile re-fetches the full filter slice of its group: n weights
    // per (filter, channel, filter row), live filters only.
    t.weight_bytes = static_cast<std::uint64_t>(tiling.t) * layer.m * layer.ic * layer.fh *
                     arch.n * wb;
    // One feature word enters the array per compute cycle.
    t.input_bytes = analytic_cycles(arch, layer) * wb;
    t.output_bytes = static_cast<std::uint64_t>(layer.ol) * layer.ol * layer.m * wb;
    return t;
}

std::uint64_t analytic_retained_products(const ArchConfig& arch, const LayerShape& layer) {
    // Per pass, the products that land inside the row: tap i of stream
    // column q contributes to output column q - i + z.
    std::uint64_t retained_cols = 0;
    for (std::uint32_t q = 0; q < layer.il; ++q)
        for (std::uint32_t i = 0; i < arch.n; ++i) {
            const std::int64_t col = static_cast<std::int64_t>(q) - i + layer.z;
            if (col >= 0 && col < layer.ol) ++retained_cols;
        }
    // Each of the m*ic*sum_valid passes runs on one live unit; idle units in
    // a partial group retain nothing.
    return static_cast<std::uint64_t>(layer.m) * layer.ic * sum_valid_filter_rows(layer) *
           retained_cols;
}

LayerCost layer_cost(const ArchConfig& arch, const LayerShape& layer, const std::string& name) {
    validate_arch(arch);
    LayerCost lc;
    lc.name = name;
    lc.shape = layer;
    lc.tiling = derive_tiling(arch, layer);
    lc.cycles = analytic_cycles(arch, layer);

    const auto seq = pass_sequence(lc.tiling, layer, arch.n);
    const auto units = build_units(lc.tiling, layer, arch, seq);
    const LayerTimeline tl = schedule_timeline(units, layer, arch);
    lc.stall_cycles = tl.stall_cycles;

    const std::uint64_t total = tl.total_cycles;
    lc.latency_ms = 1e3 * static_cast<double>(total) / arch.clock_hz;
    lc.traffic = analytic_traffic(arch, layer);
    lc.nominal_macs = layer.nominal_macs();
    lc.gops = 2.0 * static_cast<double>(lc.nominal_macs) / (static_cast<double>(total) / arch.clock_hz) / 1e9;
    lc.utilization = static_cast<double>(analytic_retained_products(arch, layer)) /
                     (static_cast<double>(arch.u) * arch.n * static_cast<double>(total));
    return lc;
}

NetworkCost network_cost(const ArchConfig& arch, const NetworkSpec& net) {
    validate_arch(arch);
    net.validate();
    NetworkCost nc;
    double retained = 0.0;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        LayerCost lc;
        try {
            lc = layer_cost(arch, net.layers[i].shape,
                            net.layers[i].name.empty() ? "layer" + std::to_string(i)
                                                       : net.layers[i].name);
        } catch (const SimError& e) {
            raise(e.code(), "layer " + std::to_string(i) + ": " + e.what());
        }
        const std::uint64_t total = lc.cycles + lc.stall_cycles + 1;
        nc.cycles += total;
        nc.stall_cycles += lc.stall_cycles;
        nc.traffic.weight_bytes += lc.traffic.weight_bytes;
        nc.traffic.input_bytes += lc.traffic.input_bytes;
        nc.traffic.output_bytes += lc.traffic.output_bytes;
        nc.nominal_macs += lc.nominal_macs;
        retained += lc.utilization * static_cast<double>(total);
        nc.layers.push_back(std::move(lc));
    }
    nc.latency_ms = 1e3 * static_cast<double>(nc.cycles) / arch.clock_hz;
    if (nc.cycles > 0) {
        nc.gops = 2.0 * static_cast<double>(nc.nominal_macs) /
                  (static_cast<double>(nc.cycles) / arch.clock_hz) / 1e9;
        nc.utilization = retained / static_cast<double>(nc.cycles);
    }
    return nc;
}

std::vector<SweepPoint> sweep(const ArchConfig& base, const NetworkSpec& net,
                              const std::string& parameter,
                              const std::vector<std::uint64_t>& values) {
    if (values.empty()) raise(ErrorCode::EmptyRange, "sweep over '" + parameter + "' has no values");
    std::vector<SweepPoint> points;
    for (std::uint64_t v : values) {
        SweepPoint p;
        p.parameter = parameter;
        p.value = v;
        ArchConfig a = base;
        const auto v32 = static_cast<std::uint32_t>(v);
        if (parameter == "sram_depth") a.sram_depth = v32;
        else if (parameter == "u") a.u = v32;
        else if (parameter == "n") a.n = v32;
        else if (parameter == "drain_words_per_cycle") a.drain_words_per_cycle = v32;
        else raise(ErrorCode::FormatError, "unknown sweep parameter '" + parameter + "'");
        try {
            p.cost = network_cost(a, net);
            p.ok = true;
        } catch (const SimError& e) {
            p.error = e.what();
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace sacc
