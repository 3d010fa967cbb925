#include "sacc/runner.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "sacc/golden.hpp"
#include "sacc/io.hpp"
#include "sacc/prng.hpp"

namespace sacc {

namespace {

// Stable per-layer stimulus seeds: drawn from one stream indexed by the
// absolute layer position, so simulating a sub-range uses the same data as
// a full run.
struct SeedPlan {
    std::uint64_t input = 0;
    std::vector<std::uint64_t> filters;
};

SeedPlan make_seeds(std::uint64_t seed, std::size_t layer_count) {
    SplitMix64 rng(seed);
    SeedPlan plan;
    plan.input = rng.next();
    for (std::size_t i = 0; i < layer_count; ++i) plan.filters.push_back(rng.next());
    return plan;
}

void compare_with_golden(const LayerShape& layer, const Tensor& input, const FilterSet& filters,
                         const FixedPointRules& rules, const Tensor& engine_out,
                         const std::string& name) {
    const Tensor want = golden_conv(layer, input, filters, rules);
    if (want == engine_out) return;
    for (std::uint32_t c = 0; c < want.channels; ++c)
        for (std::uint32_t r = 0; r < want.rows; ++r)
            for (std::uint32_t q = 0; q < want.cols; ++q)
                if (want.at(c, r, q) != engine_out.at(c, r, q))
                    raise(ErrorCode::Internal,
                          name + ": engine output differs from the reference at (" +
                              std::to_string(c) + "," + std::to_string(r) + "," +
                              std::to_string(q) + "): got " +
                              std::to_string(engine_out.at(c, r, q)) + ", want " +
                              std::to_string(want.at(c, r, q)));
    raise(ErrorCode::Internal, name + ": outputs differ");  // unreachable
}

}  // namespace

NetworkRun run_network(const RunManifest& manifest) {
    validate_arch(manifest.arch);
    manifest.net.validate();
    const std::size_t count = manifest.net.layers.size();
    const std::uint32_t begin = manifest.layer_begin;
    const std::uint32_t end =
        std::min<std::uint32_t>(manifest.layer_end, static_cast<std::uint32_t>(count));
    if (begin >= end)
        raise(ErrorCode::EmptyRange, "layer range [" + std::to_string(begin) + ", " +
                                         std::to_string(manifest.layer_end) +
                                         ") selects nothing");

    NetworkSpec selected;
    selected.layers.assign(manifest.net.layers.begin() + begin, manifest.net.layers.begin() + end);

    NetworkRun run;
    run.cost = network_cost(manifest.arch, selected);
    for (std::size_t i = 0; i < run.cost.layers.size(); ++i) {
        LayerRun lr;
        lr.name = run.cost.layers[i].name;
        lr.cost = run.cost.layers[i];
        run.layers.push_back(std::move(lr));
    }
    if (manifest.mode == RunMode::Cost) return run;

    if (!manifest.filter_paths.empty() && manifest.filter_paths.size() != end - begin)
        raise(ErrorCode::FormatError,
              "need " + std::to_string(end - begin) + " filter files, got " +
                  std::to_string(manifest.filter_paths.size()));

    const SeedPlan seeds = make_seeds(manifest.seed, count);
    const FixedPointRules rules = rules_for(manifest.arch);

    const LayerShape& first = selected.layers.front().shape;
    Tensor activations;
    if (manifest.input_path) {
        activations = load_tensor(*manifest.input_path);
        if (activations.channels != first.ic || activations.rows != first.il ||
            activations.cols != first.il)
            raise(ErrorCode::ShapeMismatch,
                  *manifest.input_path + " is " + std::to_string(activations.channels) + "x" +
                      std::to_string(activations.rows) + "x" + std::to_string(activations.cols) +
                      ", layer " + std::to_string(begin) + " wants " + std::to_string(first.ic) +
                      "x" + std::to_string(first.il) + "x" + std::to_string(first.il));
    } else {
        activations = random_tensor(first.ic, first.il, first.il, seeds.input);
    }

    bool all_ok = true;
    for (std::size_t i = 0; i < selected.layers.size(); ++i) {
        const NetworkLayer& nl = selected.layers[i];
        const FilterSet filters =
            manifest.filter_paths.empty()
                ? random_filters(nl.shape, seeds.filters[begin + i])
                : load_filters(manifest.filter_paths[i]);
        EngineOptions opts;
        opts.checked = manifest.checked;
        opts.logging = manifest.logging;
        RunResult res = run_layer(manifest.arch, nl.shape, activations, filters, opts,
                                  manifest.threads);

        LayerRun& lr = run.layers[i];
        lr.measured_cycles = res.cycles;
        lr.measured_stalls = res.stall_cycles;
        const std::uint64_t wb = manifest.arch.word_bytes();
        lr.measured_traffic.weight_bytes = res.trace.weight_words * wb;
        lr.measured_traffic.input_bytes = res.trace.input_words * wb;
        lr.measured_traffic.output_bytes = res.trace.output_words * wb;
        lr.measured_utilization = res.utilization;
        lr.trace = std::move(res.trace);

        if (manifest.mode == RunMode::Verify) {
            compare_with_golden(nl.shape, activations, filters, rules, res.output, lr.name);
            lr.verified = true;
        }
        activations = apply_host_op(nl.host_op, res.output);
        all_ok = all_ok && (manifest.mode != RunMode::Verify || lr.verified);
    }
    run.output = std::move(activations);
    run.all_verified = manifest.mode == RunMode::Verify && all_ok;
    return run;
}

PaperComparison compare_to_reference(const ArchConfig& arch, const NetworkCost& cost) {
    if (!is_reference_arch(arch))
        raise(ErrorCode::NotDefaultConfig,
              "published figures assume the default configuration");
    const NetworkSpec preset = vgg16_conv_preset();
    if (cost.layers.size() != preset.layers.size())
        raise(ErrorCode::NotDefaultConfig, "published figures assume the full 13-layer network");
    for (std::size_t i = 0; i < preset.layers.size(); ++i)
        if (!(cost.layers[i].shape == preset.layers[i].shape))
            raise(ErrorCode::NotDefaultConfig,
                  "layer " + std::to_string(i) + " differs from the preset network");

    PaperComparison cmp;
    auto add = [&cmp](const std::string& metric, double ours, double published) {
        PaperComparison::Row row;
        row.metric = metric;
        row.ours = ours;
        row.published = published;
        row.rel_error = std::abs(ours - published) / published;
        cmp.rows.push_back(row);
    };
    add("latency_ms", cost.latency_ms, 393.0);
    add("dram_mib", static_cast<double>(cost.traffic.total_bytes()) / (1024.0 * 1024.0), 251.5);
    add("gops", cost.gops, 78.1);
    cmp.pass = true;
    for (const auto& row : cmp.rows) cmp.pass = cmp.pass && row.rel_error <= 0.005;
    return cmp;
}

std::string render_comparison(const PaperComparison& cmp) {
    std::string out = "metric        model          published      rel_error\n";
    char buf[128];
    for (const auto& row : cmp.rows) {
        std::snprintf(buf, sizeof(buf), "%-12s  %-13.4f  %-13.4f  %.4f%%\n", row.metric.c_str(),
                      row.ours, row.published, 100.0 * row.rel_error);
        out += buf;
    }
    out += cmp.pass ? "PASS: all metrics within 0.5%\n" : "FAIL: a metric exceeds 0.5%\n";
    return out;
}

}  // namespace sacc
