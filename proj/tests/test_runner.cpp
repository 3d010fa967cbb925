#include <doctest.h>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "sacc/golden.hpp"
#include "sacc/io.hpp"
#include "sacc/runner.hpp"

using namespace sacc;

namespace {

std::string path_of(const std::string& leaf) {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("sacc-runner-test-" + std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(d);
        return d;
    }();
    return (dir / leaf).string();
}

ArchConfig small_arch() {
    ArchConfig a;
    a.u = 2;
    a.sram_depth = 32;
    return a;
}

// Two chained layers small enough to recompute by hand: 2x8x8 -> 3x8x8
// (relu) -> 4x8x8 (relu + 2x2 maxpool) -> 4x4x4.
NetworkSpec small_net() {
    NetworkSpec net;
    net.layers.push_back({validate_layer({8, 2, 3, 3, 1, 1, 3}), HostOp::Relu, "a"});
    net.layers.push_back({validate_layer({8, 3, 3, 3, 1, 1, 4}), HostOp::ReluMaxpool2x2, "b"});
    net.validate();
    return net;
}

}  // namespace

TEST_CASE("verify mode replays the reference network's first layers") {
    RunManifest m;
    m.mode = RunMode::Verify;
    m.net = vgg16_conv_preset();
    m.layer_begin = 0;
    m.layer_end = 2;
    m.seed = 42;
    m.threads = 8;
    const NetworkRun run = run_network(m);

    REQUIRE(run.layers.size() == 2);
    CHECK(run.all_verified);
    CHECK(run.layers[0].verified);
    CHECK(run.layers[1].verified);
    CHECK(run.layers[0].name == "conv1_1");

    // Measured timing and traffic must land exactly on the analytic model.
    for (const LayerRun& lr : run.layers) {
        CHECK(lr.measured_cycles == lr.cost.cycles + lr.cost.stall_cycles + 1);
        CHECK(lr.measured_stalls == lr.cost.stall_cycles);
        CHECK(lr.measured_traffic == lr.cost.traffic);
    }
    CHECK(run.layers[0].measured_cycles == 450241);

    // conv1_2 pools 64x224x224 down to 64x112x112 for the next layer.
    CHECK(run.output.channels == 64);
    CHECK(run.output.rows == 112);
    CHECK(run.output.cols == 112);
}

TEST_CASE("cost mode reports the full network without simulating") {
    RunManifest m;
    m.net = vgg16_conv_preset();
    const NetworkRun run = run_network(m);
    REQUIRE(run.layers.size() == 13);
    CHECK(run.cost.cycles == 78610125);
    CHECK(run.cost.traffic.total_bytes() == 263738752);
    CHECK_FALSE(run.all_verified);
    CHECK(run.layers[0].measured_cycles == 0);  // engine never ran
    CHECK(run.output.data.empty());
}

TEST_CASE("file-fed run matches an external golden recomputation") {
    const ArchConfig a = small_arch();
    const NetworkSpec net = small_net();
    const FixedPointRules rules = rules_for(a);

    const Tensor input = random_tensor(2, 8, 8, 7001);
    const FilterSet f0 = random_filters(net.layers[0].shape, 7002);
    const FilterSet f1 = random_filters(net.layers[1].shape, 7003);
    save_tensor(path_of("in.bin"), input);
    save_filters(path_of("f0.bin"), f0);
    save_filters(path_of("f1.bin"), f1);

    RunManifest m;
    m.mode = RunMode::Verify;
    m.arch = a;
    m.net = net;
    m.input_path = path_of("in.bin");
    m.filter_paths = {path_of("f0.bin"), path_of("f1.bin")};
    m.checked = true;
    const NetworkRun run = run_network(m);
    CHECK(run.all_verified);

    // Same pipeline computed with the direct reference model only.
    Tensor acts = apply_host_op(HostOp::Relu,
                                golden_conv(net.layers[0].shape, input, f0, rules));
    acts = apply_host_op(HostOp::ReluMaxpool2x2,
                         golden_conv(net.layers[1].shape, acts, f1, rules));
    CHECK(run.output == acts);
}

TEST_CASE("a saved intermediate resumes a run bit-exactly") {
    const ArchConfig a = small_arch();
    const NetworkSpec net = small_net();

    RunManifest full;
    full.mode = RunMode::Simulate;
    full.arch = a;
    full.net = net;
    full.seed = 99;
    const NetworkRun whole = run_network(full);

    RunManifest head = full;
    head.layer_end = 1;
    const NetworkRun first = run_network(head);
    save_tensor(path_of("mid.bin"), first.output);

    // The tail run draws layer 1's filters from the same absolute position
    // of the seed stream, so feeding it the saved activations reproduces the
    // full run exactly.
    RunManifest tail = full;
    tail.layer_begin = 1;
    tail.input_path = path_of("mid.bin");
    const NetworkRun rest = run_network(tail);
    CHECK(rest.output == whole.output);
}

TEST_CASE("manifest validation catches the usual mistakes") {
    RunManifest m;
    m.arch = small_arch();
    m.net = small_net();

    RunManifest empty = m;
    empty.layer_begin = 5;
    CHECK_THROWS_WITH_AS(static_cast<void>(run_network(empty)), doctest::Contains("EmptyRange"),
                         SimError);

    RunManifest missing = m;
    missing.mode = RunMode::Simulate;
    missing.input_path = path_of("no_such_input.bin");
    CHECK_THROWS_WITH_AS(static_cast<void>(run_network(missing)),
                         doctest::Contains("no_such_input.bin"), SimError);

    RunManifest wrong_count = m;
    wrong_count.mode = RunMode::Simulate;
    wrong_count.filter_paths = {path_of("only_one.bin")};
    CHECK_THROWS_WITH_AS(static_cast<void>(run_network(wrong_count)),
                         doctest::Contains("filter files"), SimError);

    const Tensor odd = random_tensor(1, 3, 3, 5);
    save_tensor(path_of("odd.bin"), odd);
    RunManifest bad_shape = m;
    bad_shape.mode = RunMode::Simulate;
    bad_shape.input_path = path_of("odd.bin");
    CHECK_THROWS_WITH_AS(static_cast<void>(run_network(bad_shape)),
                         doctest::Contains("ShapeMismatch"), SimError);
}

TEST_CASE("reference comparison passes only for the genuine configuration") {
    const NetworkCost nc = network_cost(ArchConfig{}, vgg16_conv_preset());
    const PaperComparison cmp = compare_to_reference(ArchConfig{}, nc);
    REQUIRE(cmp.rows.size() == 3);
    CHECK(cmp.pass);
    for (const auto& row : cmp.rows) {
        CAPTURE(row.metric);
        CHECK(row.rel_error <= 0.005);
    }
    CHECK(render_comparison(cmp).find("PASS") != std::string::npos);

    // A tuned configuration must refuse the comparison outright.
    ArchConfig tuned;
    tuned.sram_depth = 224;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(compare_to_reference(tuned, network_cost(tuned, vgg16_conv_preset()))),
        doctest::Contains("NotDefaultConfig"), SimError);

    // So must a partial network, even at the default configuration.
    NetworkSpec partial = vgg16_conv_preset();
    partial.layers.pop_back();
    CHECK_THROWS_WITH_AS(
        static_cast<void>(compare_to_reference(ArchConfig{}, network_cost(ArchConfig{}, partial))),
        doctest::Contains("NotDefaultConfig"), SimError);

    // And tampered figures fail the tolerance check rather than pass quietly.
    NetworkCost off = nc;
    off.latency_ms *= 1.02;
    const PaperComparison bad = compare_to_reference(ArchConfig{}, off);
    CHECK_FALSE(bad.pass);
    CHECK(render_comparison(bad).find("FAIL") != std::string::npos);
}
