#include <doctest.h>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sacc/cost.hpp"
#include "sacc/engine.hpp"
#include "sacc/io.hpp"
#include "sacc/tensor.hpp"

using namespace sacc;

namespace {

// Unique scratch path per test file run; cleaned up by the fixture below.
std::filesystem::path scratch() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("sacc-io-test-" + std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& leaf) { return (scratch() / leaf).string(); }

std::vector<std::string> lines_of(const std::string& body) {
    std::vector<std::string> out;
    std::istringstream in(body);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("tensor files round-trip bit for bit") {
    const Tensor t = random_tensor(3, 5, 7, 99, -32768, 32767);
    const std::string path = path_of("t.bin");
    save_tensor(path, t);
    const Tensor back = load_tensor(path);
    CHECK(back == t);
}

TEST_CASE("filter files round-trip bit for bit") {
    const LayerShape l = validate_layer({8, 3, 3, 3, 1, 1, 5});
    FilterSet f = random_filters(l, 123, -32768, 32767);
    f.biases = {1, -2, 2147483647, -2147483648, 0};
    const std::string path = path_of("f.bin");
    save_filters(path, f);
    const FilterSet back = load_filters(path);
    CHECK(back.weights == f.weights);
    CHECK(back.biases == f.biases);
    CHECK(back.m == f.m);
    CHECK(back.ic == f.ic);
    CHECK(back.fh == f.fh);
    CHECK(back.fl == f.fl);
}

TEST_CASE("corrupt tensor files are rejected with the path named") {
    const Tensor t = random_tensor(1, 2, 2, 5);
    const std::string good = path_of("good.bin");
    save_tensor(good, t);
    const std::string body = read_text_file(good);

    const std::string bad_magic = path_of("bad_magic.bin");
    write_text_file(bad_magic, "SACX" + body.substr(4));
    CHECK_THROWS_WITH_AS(static_cast<void>(load_tensor(bad_magic)),
                         doctest::Contains("bad_magic.bin"), SimError);

    const std::string bad_version = path_of("bad_version.bin");
    std::string v = body;
    v[4] = 9;
    write_text_file(bad_version, v);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_tensor(bad_version)),
                         doctest::Contains("FormatError"), SimError);

    const std::string truncated = path_of("truncated.bin");
    write_text_file(truncated, body.substr(0, body.size() - 3));
    CHECK_THROWS_WITH_AS(static_cast<void>(load_tensor(truncated)),
                         doctest::Contains("FormatError"), SimError);

    CHECK_THROWS_WITH_AS(static_cast<void>(load_tensor(path_of("missing.bin"))),
                         doctest::Contains("IoError"), SimError);

    // A header promising more elements than the payload holds must not make
    // the loader allocate first and find out later.
    const std::string huge = path_of("huge.bin");
    std::string h = body;
    h[8] = h[9] = h[10] = h[11] = static_cast<char>(0xff);  // channels field
    write_text_file(huge, h);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_tensor(huge)),
                         doctest::Contains("FormatError"), SimError);
}

TEST_CASE("filter files validate magic and size") {
    const LayerShape l = validate_layer({4, 1, 3, 3, 1, 1, 2});
    const FilterSet f = random_filters(l, 9);
    const std::string good = path_of("filters.bin");
    save_filters(good, f);
    const std::string body = read_text_file(good);

    const std::string swapped = path_of("tensor_as_filters.bin");
    save_tensor(swapped, random_tensor(1, 2, 2, 1));
    CHECK_THROWS_WITH_AS(static_cast<void>(load_filters(swapped)),
                         doctest::Contains("FormatError"), SimError);

    const std::string cut = path_of("filters_cut.bin");
    write_text_file(cut, body.substr(0, body.size() - 2));
    CHECK_THROWS_WITH_AS(static_cast<void>(load_filters(cut)),
                         doctest::Contains("FormatError"), SimError);
}

TEST_CASE("arch configs round-trip through JSON") {
    ArchConfig a;
    a.u = 32;
    a.sram_depth = 224;
    a.out_shift = 7;
    a.drain_words_per_cycle = 4;
    a.clock_hz = 150e6;
    const std::string path = path_of("arch.json");
    save_arch(path, a);
    const ArchConfig back = load_arch(path);
    CHECK(back.u == a.u);
    CHECK(back.n == a.n);
    CHECK(back.sram_depth == a.sram_depth);
    CHECK(back.sram_word_bits == a.sram_word_bits);
    CHECK(back.data_bits == a.data_bits);
    CHECK(back.clock_hz == a.clock_hz);
    CHECK(back.out_shift == a.out_shift);
    CHECK(back.drain_words_per_cycle == a.drain_words_per_cycle);
}

TEST_CASE("network specs round-trip through JSON") {
    const NetworkSpec net = vgg16_conv_preset();
    const std::string path = path_of("net.json");
    save_network(path, net);
    const NetworkSpec back = load_network(path);
    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        CHECK(back.layers[i].name == net.layers[i].name);
        CHECK(back.layers[i].host_op == net.layers[i].host_op);
        CHECK(back.layers[i].shape.il == net.layers[i].shape.il);
        CHECK(back.layers[i].shape.ic == net.layers[i].shape.ic);
        CHECK(back.layers[i].shape.m == net.layers[i].shape.m);
        CHECK(back.layers[i].shape.z == net.layers[i].shape.z);
        CHECK(back.layers[i].shape.ol == net.layers[i].shape.ol);
    }
}

TEST_CASE("unknown JSON keys are rejected, not ignored") {
    const std::string arch = path_of("arch_extra.json");
    write_text_file(arch, R"({"u": 64, "cus": 64})");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_arch(arch)), doctest::Contains("cus"), SimError);

    const std::string net = path_of("net_extra.json");
    write_text_file(net, R"({"layers": [{"il": 8, "ic": 1, "fl": 3, "fh": 3,
                            "z": 1, "s": 1, "m": 4, "padding": 1}]})");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_network(net)), doctest::Contains("padding"),
                         SimError);

    const std::string neg = path_of("arch_neg.json");
    write_text_file(neg, R"({"u": -3})");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_arch(neg)), doctest::Contains("FormatError"),
                         SimError);
}

TEST_CASE("CSV report has the documented shape and numbers") {
    const NetworkCost nc = network_cost(ArchConfig{}, vgg16_conv_preset());
    const std::string csv = render_report(nc, ReportFormat::Csv);
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() == 15);  // header + 13 layers + total
    CHECK(lines[0] ==
          "layer,cycles,latency_ms,weights_bytes,inputs_bytes,outputs_bytes,total_bytes,"
          "nominal_macs,gops,utilization");
    CHECK(lines[1].substr(0, lines[1].find(',')) == "conv1_1");
    // Occupied cycles (compute + stalls + flush) in column 2 of row 1.
    const auto first_field_end = lines[1].find(',');
    const auto second_field_end = lines[1].find(',', first_field_end + 1);
    CHECK(lines[1].substr(first_field_end + 1, second_field_end - first_field_end - 1) ==
          "450241");
    CHECK(lines[14].substr(0, 6) == "total,");
    CHECK(lines[14].find(",78610125,") != std::string::npos);
    CHECK(lines[14].find(",263738752,") != std::string::npos);
}

TEST_CASE("JSON report agrees with the CSV on every count") {
    const NetworkCost nc = network_cost(ArchConfig{}, vgg16_conv_preset());
    const auto j = nlohmann::json::parse(render_report(nc, ReportFormat::Json));
    REQUIRE(j.at("layers").size() == 13);
    CHECK(j.at("total").at("cycles").get<std::uint64_t>() == 78610125);
    CHECK(j.at("total").at("total_bytes").get<std::uint64_t>() == 263738752);
    CHECK(j.at("total").at("nominal_macs").get<std::uint64_t>() == 15346630656ull);
    CHECK(j.at("layers")[0].at("layer").get<std::string>() == "conv1_1");
    CHECK(j.at("layers")[0].at("cycles").get<std::uint64_t>() == 450241);
    CHECK(j.at("layers")[12].at("cycles").get<std::uint64_t>() == 2293761);

    std::uint64_t sum = 0;
    for (const auto& layer : j.at("layers")) sum += layer.at("cycles").get<std::uint64_t>();
    CHECK(sum == j.at("total").at("cycles").get<std::uint64_t>());
}

TEST_CASE("trace CSV lists transfers in canonical order") {
    ArchConfig a;
    a.u = 2;
    a.sram_depth = 12;
    const LayerShape l = validate_layer({4, 2, 3, 3, 1, 1, 3});
    EngineOptions opts;
    opts.logging = true;
    const RunResult res =
        run_layer(a, l, random_tensor(2, 4, 4, 3), random_filters(l, 4), opts);
    const auto lines = lines_of(render_trace(res.trace));
    REQUIRE(lines.size() == res.trace.log.size() + 1);
    CHECK(lines[0] == "cycle,category,group,tile,channel,filter_row,words");
    CHECK(lines[1].find(",W,") != std::string::npos);

    DramTrace off;
    CHECK_THROWS_WITH_AS(static_cast<void>(render_trace(off)),
                         doctest::Contains("LoggingDisabled"), SimError);
}

TEST_CASE("report format names parse and reject typos") {
    CHECK(report_format_from_name("csv") == ReportFormat::Csv);
    CHECK(report_format_from_name("json") == ReportFormat::Json);
    CHECK_THROWS_WITH_AS(static_cast<void>(report_format_from_name("yaml")),
                         doctest::Contains("FormatError"), SimError);
}

TEST_CASE("text files round-trip including embedded NUL-free binary") {
    const std::string path = path_of("note.txt");
    const std::string body = "line a\nline b\n";
    write_text_file(path, body);
    CHECK(read_text_file(path) == body);
    CHECK_THROWS_WITH_AS(static_cast<void>(read_text_file(path_of("absent.txt"))),
                         doctest::Contains("IoError"), SimError);
}
