// saccsim: cost model, cycle-accurate simulator and verifier for the
// serial-accumulation convolution accelerator.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sacc/cost.hpp"
#include "sacc/io.hpp"
#include "sacc/runner.hpp"

namespace {

using namespace sacc;

struct CommonArgs {
    std::string arch_path;
    std::string net = "vgg16";
    std::string layers;
    std::string format = "csv";
    std::string out;
    std::uint64_t seed = 1;
    std::uint32_t threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_sim_flags) {
    cmd->add_option("--arch", args.arch_path, "architecture config (JSON); default: reference");
    cmd->add_option("--net", args.net, "'vgg16' or a network config (JSON)")
        ->capture_default_str();
    cmd->add_option("--layers", args.layers, "layer range 'A:B' (half-open) or a single index");
    cmd->add_option("--format", args.format, "report format: csv or json")
        ->capture_default_str();
    cmd->add_option("--out", args.out, "write the report here instead of stdout");
    if (with_sim_flags) {
        cmd->add_option("--seed", args.seed, "seed for generated inputs/weights")
            ->capture_default_str();
        cmd->add_option("--threads", args.threads, "worker threads (one filter group each)")
            ->capture_default_str();
    }
}

ArchConfig resolve_arch(const CommonArgs& args) {
    if (args.arch_path.empty()) return ArchConfig{};
    return load_arch(args.arch_path);
}

NetworkSpec resolve_net(const CommonArgs& args) {
    if (args.net == "vgg16") return vgg16_conv_preset();
    return load_network(args.net);
}

// "A:B" half-open, or "K" meaning [K, K+1).
std::pair<std::uint32_t, std::uint32_t> parse_layer_range(const std::string& text) {
    if (text.empty()) return {0, 0xffffffffu};
    try {
        const auto colon = text.find(':');
        if (colon == std::string::npos) {
            const auto k = static_cast<std::uint32_t>(std::stoul(text));
            return {k, k + 1};
        }
        return {static_cast<std::uint32_t>(std::stoul(text.substr(0, colon))),
                static_cast<std::uint32_t>(std::stoul(text.substr(colon + 1)))};
    } catch (const std::exception&) {
        raise(ErrorCode::FormatError, "bad --layers '" + text + "', want 'A:B' or 'K'");
    }
}

void emit(const CommonArgs& args, const std::string& body) {
    if (args.out.empty())
        std::cout << body;
    else
        write_text_file(args.out, body);
}

// The measured counters of a simulation rendered with the same columns as
// the analytic report.
NetworkCost measured_cost(const NetworkRun& run, const ArchConfig& arch) {
    NetworkCost nc;
    double retained = 0.0;
    for (const LayerRun& lr : run.layers) {
        LayerCost lc = lr.cost;
        lc.cycles = lr.measured_cycles - lr.measured_stalls - 1;
        lc.stall_cycles = lr.measured_stalls;
        lc.latency_ms = 1e3 * static_cast<double>(lr.measured_cycles) / arch.clock_hz;
        lc.traffic = lr.measured_traffic;
        lc.gops = 2.0 * static_cast<double>(lc.nominal_macs) /
                  (static_cast<double>(lr.measured_cycles) / arch.clock_hz) / 1e9;
        lc.utilization = lr.measured_utilization;
        nc.cycles += lr.measured_cycles;
        nc.stall_cycles += lr.measured_stalls;
        nc.traffic.weight_bytes += lc.traffic.weight_bytes;
        nc.traffic.input_bytes += lc.traffic.input_bytes;
        nc.traffic.output_bytes += lc.traffic.output_bytes;
        nc.nominal_macs += lc.nominal_macs;
        retained += lc.utilization * static_cast<double>(lr.measured_cycles);
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

std::string render_sweep(const std::vector<SweepPoint>& points, ReportFormat fmt) {
    if (fmt == ReportFormat::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const SweepPoint& p : points) {
            nlohmann::json row{{"parameter", p.parameter}, {"value", p.value}, {"ok", p.ok}};
            if (p.ok) {
                row["cycles"] = p.cost.cycles;
                row["latency_ms"] = p.cost.latency_ms;
                row["weights_bytes"] = p.cost.traffic.weight_bytes;
                row["inputs_bytes"] = p.cost.traffic.input_bytes;
                row["outputs_bytes"] = p.cost.traffic.output_bytes;
                row["total_bytes"] = p.cost.traffic.total_bytes();
                row["gops"] = p.cost.gops;
                row["utilization"] = p.cost.utilization;
            } else {
                row["error"] = p.error;
            }
            arr.push_back(row);
        }
        return arr.dump(2) + "\n";
    }
    std::string out =
        "parameter,value,status,cycles,latency_ms,weights_bytes,inputs_bytes,outputs_bytes,"
        "total_bytes,gops,utilization,error\n";
    char buf[64];
    for (const SweepPoint& p : points) {
        out += p.parameter + ',' + std::to_string(p.value) + ',';
        if (p.ok) {
            std::snprintf(buf, sizeof(buf), "%.6f", p.cost.latency_ms);
            out += "ok," + std::to_string(p.cost.cycles) + ',' + buf;
            out += ',' + std::to_string(p.cost.traffic.weight_bytes);
            out += ',' + std::to_string(p.cost.traffic.input_bytes);
            out += ',' + std::to_string(p.cost.traffic.output_bytes);
            out += ',' + std::to_string(p.cost.traffic.total_bytes());
            std::snprintf(buf, sizeof(buf), "%.6f", p.cost.gops);
            out += ',' + std::string(buf);
            std::snprintf(buf, sizeof(buf), "%.6f", p.cost.utilization);
            out += ',' + std::string(buf) + ',';
        } else {
            out += "error,,,,,,,,,\"" + p.error + '"';
        }
        out += '\n';
    }
    return out;
}

int run_cost(const CommonArgs& args) {
    RunManifest manifest;
    manifest.mode = RunMode::Cost;
    manifest.arch = resolve_arch(args);
    manifest.net = resolve_net(args);
    std::tie(manifest.layer_begin, manifest.layer_end) = parse_layer_range(args.layers);
    const NetworkRun run = run_network(manifest);
    emit(args, render_report(run.cost, report_format_from_name(args.format)));
    return 0;
}

int run_sim(const CommonArgs& args, RunMode mode, const std::string& input_path,
            const std::string& weights_csv, const std::string& save_output, bool checked,
            const std::string& trace_out) {
    RunManifest manifest;
    manifest.mode = mode;
    manifest.arch = resolve_arch(args);
    manifest.net = resolve_net(args);
    std::tie(manifest.layer_begin, manifest.layer_end) = parse_layer_range(args.layers);
    manifest.seed = args.seed;
    manifest.threads = args.threads;
    manifest.checked = checked;
    manifest.logging = !trace_out.empty();
    if (!input_path.empty()) manifest.input_path = input_path;
    if (!weights_csv.empty()) {
        std::size_t pos = 0;
        while (pos <= weights_csv.size()) {
            const auto comma = weights_csv.find(',', pos);
            const auto end = comma == std::string::npos ? weights_csv.size() : comma;
            if (end > pos) manifest.filter_paths.push_back(weights_csv.substr(pos, end - pos));
            pos = end + 1;
        }
    }

    const NetworkRun run = run_network(manifest);
    emit(args, render_report(measured_cost(run, manifest.arch),
                             report_format_from_name(args.format)));
    if (!trace_out.empty()) {
        if (run.layers.size() != 1)
            raise(ErrorCode::FormatError,
                  "--trace-out needs a single-layer range (use --layers K)");
        write_text_file(trace_out, render_trace(run.layers[0].trace));
    }
    if (!save_output.empty()) save_tensor(save_output, run.output);
    if (mode == RunMode::Verify)
        std::cerr << "verified: " << run.layers.size() << " layer(s) bit-exact\n";
    return 0;
}

int run_sweep(const CommonArgs& args, const std::string& parameter,
              const std::string& values_csv) {
    std::vector<std::uint64_t> values;
    std::size_t pos = 0;
    try {
        while (pos <= values_csv.size()) {
            const auto comma = values_csv.find(',', pos);
            const auto end = comma == std::string::npos ? values_csv.size() : comma;
            if (end > pos) values.push_back(std::stoull(values_csv.substr(pos, end - pos)));
            pos = end + 1;
        }
    } catch (const std::exception&) {
        raise(ErrorCode::FormatError, "bad --values '" + values_csv + "'");
    }
    const auto points = sweep(resolve_arch(args), resolve_net(args), parameter, values);
    emit(args, render_sweep(points, report_format_from_name(args.format)));
    return 0;
}

int run_compare(const CommonArgs& args) {
    const ArchConfig arch = resolve_arch(args);
    const NetworkCost cost = network_cost(arch, vgg16_conv_preset());
    const PaperComparison cmp = compare_to_reference(arch, cost);
    emit(args, render_comparison(cmp));
    return cmp.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial-accumulation convolution accelerator model"};
    app.require_subcommand(1);

    CommonArgs cost_args;
    CLI::App* cost_cmd = app.add_subcommand("cost", "analytic latency/traffic report");
    add_common(cost_cmd, cost_args, false);

    CommonArgs sim_args;
    std::string sim_input, sim_weights, sim_save, sim_trace;
    bool sim_checked = false;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "cycle-accurate run, measured report");
    add_common(sim_cmd, sim_args, true);
    sim_cmd->add_option("--input", sim_input, "input tensor file (default: seeded)");
    sim_cmd->add_option("--weights", sim_weights, "comma-separated filter files, one per layer");
    sim_cmd->add_option("--save-output", sim_save, "write the final activations here");
    sim_cmd->add_option("--trace-out", sim_trace, "write the DRAM transfer log here (one layer)");
    sim_cmd->add_flag("--checked", sim_checked, "enable internal consistency assertions");

    CommonArgs verify_args;
    std::string ver_input, ver_weights, ver_save, ver_trace;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "simulate and compare against the reference convolution");
    add_common(verify_cmd, verify_args, true);
    verify_cmd->add_option("--input", ver_input, "input tensor file (default: seeded)");
    verify_cmd->add_option("--weights", ver_weights, "comma-separated filter files");
    verify_cmd->add_option("--save-output", ver_save, "write the final activations here");
    verify_cmd->add_option("--trace-out", ver_trace, "write the DRAM transfer log here");

    CommonArgs trace_args;
    std::string trace_out;
    CLI::App* trace_cmd = app.add_subcommand("trace", "single-layer run with a DRAM log");
    add_common(trace_cmd, trace_args, true);
    trace_cmd->add_option("--trace-out", trace_out, "destination for the transfer log (CSV)");

    CommonArgs sweep_args;
    std::string sweep_param = "sram_depth", sweep_values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "cost over a range of one parameter");
    add_common(sweep_cmd, sweep_args, false);
    sweep_cmd->add_option("--param", sweep_param,
                          "sram_depth | u | n | drain_words_per_cycle")
        ->capture_default_str();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

    CommonArgs cmp_args;
    CLI::App* cmp_cmd =
        app.add_subcommand("compare-paper", "check the model against the published figures");
    add_common(cmp_cmd, cmp_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cost_cmd->parsed()) return run_cost(cost_args);
        if (sim_cmd->parsed())
            return run_sim(sim_args, RunMode::Simulate, sim_input, sim_weights, sim_save,
                           sim_checked, sim_trace);
        if (verify_cmd->parsed())
            return run_sim(verify_args, RunMode::Verify, ver_input, ver_weights, ver_save, true,
                           ver_trace);
        if (trace_cmd->parsed()) {
            if (trace_out.empty())
                raise(ErrorCode::MissingPath, "trace needs --trace-out <path>");
            if (trace_args.layers.empty()) trace_args.layers = "0";
            return run_sim(trace_args, RunMode::Simulate, "", "", "", false, trace_out);
        }
        if (sweep_cmd->parsed()) return run_sweep(sweep_args, sweep_param, sweep_values);
        if (cmp_cmd->parsed()) return run_compare(cmp_args);
    } catch (const sacc::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == sacc::ErrorCode::Internal ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
