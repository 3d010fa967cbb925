#include "sacc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sacc {

namespace {

using nlohmann::json;

constexpr std::uint32_t kFileVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_i16(std::string& out, std::int16_t v) {
    const auto u = static_cast<std::uint16_t>(v);
    out.push_back(static_cast<char>(u & 0xff));
    out.push_back(static_cast<char>((u >> 8) & 0xff));
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

// Little-endian cursor over a loaded file; throws FormatError on truncation.
struct Reader {
    const std::string& buf;
    const std::string& path;
    std::size_t pos = 0;

    void need(std::size_t count) const {
        if (pos + count > buf.size())
            raise(ErrorCode::FormatError, path + ": truncated (need " + std::to_string(count) +
                                              " bytes at offset " + std::to_string(pos) + ")");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::int16_t i16() {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
        return static_cast<std::int16_t>(v);
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    void expect_magic(const char* magic) {
        need(4);
        if (buf.compare(pos, 4, magic) != 0)
            raise(ErrorCode::FormatError, path + ": bad magic, expected '" + magic + "'");
        pos += 4;
    }
    void expect_version() {
        const std::uint32_t v = u32();
        if (v != kFileVersion)
            raise(ErrorCode::FormatError,
                  path + ": unsupported version " + std::to_string(v));
    }
    void expect_end() const {
        if (pos != buf.size())
            raise(ErrorCode::FormatError, path + ": " + std::to_string(buf.size() - pos) +
                                              " trailing bytes");
    }
};

void write_binary(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) raise(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::string read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) raise(ErrorCode::IoError, "failed reading '" + path + "'");
    return std::move(ss).str();
}

json parse_json_file(const std::string& path) {
    const std::string body = read_binary(path);
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::FormatError, path + ": not valid JSON");
    return j;
}

// Rejects unknown keys so config typos fail loudly instead of silently
// falling back to defaults.
void check_keys(const json& j, std::initializer_list<const char*> known,
                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) raise(ErrorCode::FormatError, where + ": unknown key '" + key + "'");
    }
}

std::uint32_t get_u32_or(const json& j, const char* key, std::uint32_t fallback,
                         const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned())
        raise(ErrorCode::FormatError,
              where + ": '" + std::string(key) + "' must be a non-negative integer");
    return j[key].get<std::uint32_t>();
}

double get_double_or(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        raise(ErrorCode::FormatError, where + ": '" + std::string(key) + "' must be a number");
    return j[key].get<double>();
}

std::uint32_t get_u32_required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        raise(ErrorCode::FormatError, where + ": missing key '" + std::string(key) + "'");
    if (!j[key].is_number_unsigned())
        raise(ErrorCode::FormatError,
              where + ": '" + std::string(key) + "' must be a non-negative integer");
    return j[key].get<std::uint32_t>();
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

json layer_cost_json(const LayerCost& lc) {
    const std::uint64_t total = lc.cycles + lc.stall_cycles + 1;
    return json{{"layer", lc.name},
                {"cycles", total},
                {"latency_ms", lc.latency_ms},
                {"weights_bytes", lc.traffic.weight_bytes},
                {"inputs_bytes", lc.traffic.input_bytes},
                {"outputs_bytes", lc.traffic.output_bytes},
                {"total_bytes", lc.traffic.total_bytes()},
                {"nominal_macs", lc.nominal_macs},
                {"gops", lc.gops},
                {"utilization", lc.utilization}};
}

}  // namespace

void save_tensor(const std::string& path, const Tensor& t) {
    std::string body;
    body.reserve(20 + 2 * t.data.size());
    body.append("SACC");
    put_u32(body, kFileVersion);
    put_u32(body, t.channels);
    put_u32(body, t.rows);
    put_u32(body, t.cols);
    for (std::int16_t v : t.data) put_i16(body, v);
    write_binary(path, body);
}

Tensor load_tensor(const std::string& path) {
    const std::string body = read_binary(path);
    Reader r{body, path};
    r.expect_magic("SACC");
    r.expect_version();
    Tensor t;
    t.channels = r.u32();
    t.rows = r.u32();
    t.cols = r.u32();
    // Bound the element count by the remaining payload before allocating so
    // absurd headers fail as FormatError instead of exhausting memory.
    const std::uint64_t limit = (body.size() - r.pos) / 2;
    const std::uint64_t plane = static_cast<std::uint64_t>(t.rows) * t.cols;
    if (plane != 0 && t.channels > limit / plane)
        raise(ErrorCode::FormatError, path + ": truncated payload");
    const std::uint64_t count = plane * t.channels;
    if (count > limit) raise(ErrorCode::FormatError, path + ": truncated payload");
    t.data.resize(static_cast<std::size_t>(count));
    for (auto& v : t.data) v = r.i16();
    r.expect_end();
    return t;
}

void save_filters(const std::string& path, const FilterSet& f) {
    f.check_consistent();
    std::string body;
    body.reserve(24 + 2 * f.weights.size() + 4 * f.biases.size());
    body.append("SACF");
    put_u32(body, kFileVersion);
    put_u32(body, f.m);
    put_u32(body, f.ic);
    put_u32(body, f.fh);
    put_u32(body, f.fl);
    for (std::int16_t v : f.weights) put_i16(body, v);
    for (std::int32_t b : f.biases) put_i32(body, b);
    write_binary(path, body);
}

FilterSet load_filters(const std::string& path) {
    const std::string body = read_binary(path);
    Reader r{body, path};
    r.expect_magic("SACF");
    r.expect_version();
    FilterSet f;
    f.m = r.u32();
    f.ic = r.u32();
    f.fh = r.u32();
    f.fl = r.u32();
    const std::uint64_t limit = (body.size() - r.pos) / 2;
    const std::uint64_t slice = static_cast<std::uint64_t>(f.ic) * f.fh;
    if (f.fl != 0 && slice > limit / f.fl)
        raise(ErrorCode::FormatError, path + ": truncated payload");
    const std::uint64_t per_filter = slice * f.fl;
    if (per_filter != 0 && f.m > limit / per_filter)
        raise(ErrorCode::FormatError, path + ": truncated payload");
    f.weights.resize(static_cast<std::size_t>(per_filter * f.m));
    for (auto& v : f.weights) v = r.i16();
    if (f.m > (body.size() - r.pos) / 4)
        raise(ErrorCode::FormatError, path + ": truncated payload");
    f.biases.resize(f.m);
    for (auto& b : f.biases) b = r.i32();
    r.expect_end();
    return f;
}

ArchConfig load_arch(const std::string& path) {
    const json j = parse_json_file(path);
    if (!j.is_object()) raise(ErrorCode::FormatError, path + ": expected a JSON object");
    check_keys(j,
               {"u", "n", "sram_depth", "sram_word_bits", "data_bits", "clock_hz",
                "drain_words_per_cycle", "out_shift"},
               path);
    ArchConfig a;
    a.u = get_u32_or(j, "u", a.u, path);
    a.n = get_u32_or(j, "n", a.n, path);
    a.sram_depth = get_u32_or(j, "sram_depth", a.sram_depth, path);
    a.sram_word_bits = get_u32_or(j, "sram_word_bits", a.sram_word_bits, path);
    a.data_bits = get_u32_or(j, "data_bits", a.data_bits, path);
    a.clock_hz = get_double_or(j, "clock_hz", a.clock_hz, path);
    a.drain_words_per_cycle =
        get_u32_or(j, "drain_words_per_cycle", a.drain_words_per_cycle, path);
    a.out_shift = get_u32_or(j, "out_shift", a.out_shift, path);
    validate_arch(a);
    return a;
}

void save_arch(const std::string& path, const ArchConfig& a) {
    const json j{{"u", a.u},
                 {"n", a.n},
                 {"sram_depth", a.sram_depth},
                 {"sram_word_bits", a.sram_word_bits},
                 {"data_bits", a.data_bits},
                 {"clock_hz", a.clock_hz},
                 {"drain_words_per_cycle", a.drain_words_per_cycle},
                 {"out_shift", a.out_shift}};
    write_text_file(path, j.dump(2) + "\n");
}

NetworkSpec load_network(const std::string& path) {
    const json j = parse_json_file(path);
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array())
        raise(ErrorCode::FormatError, path + ": expected {\"layers\": [...]}");
    check_keys(j, {"layers"}, path);
    NetworkSpec net;
    std::size_t idx = 0;
    for (const json& lj : j["layers"]) {
        const std::string where = path + ": layers[" + std::to_string(idx) + "]";
        if (!lj.is_object()) raise(ErrorCode::FormatError, where + ": expected an object");
        check_keys(lj, {"name", "il", "ic", "fl", "fh", "z", "s", "m", "host_op"}, where);
        LayerParams p;
        p.il = get_u32_required(lj, "il", where);
        p.ic = get_u32_required(lj, "ic", where);
        p.fl = get_u32_required(lj, "fl", where);
        p.fh = get_u32_required(lj, "fh", where);
        p.z = get_u32_required(lj, "z", where);
        p.s = get_u32_required(lj, "s", where);
        p.m = get_u32_required(lj, "m", where);
        NetworkLayer layer;
        layer.shape = validate_layer(p);
        if (lj.contains("host_op")) {
            if (!lj["host_op"].is_string())
                raise(ErrorCode::FormatError, where + ": 'host_op' must be a string");
            layer.host_op = host_op_from_name(lj["host_op"].get<std::string>());
        }
        if (lj.contains("name")) {
            if (!lj["name"].is_string())
                raise(ErrorCode::FormatError, where + ": 'name' must be a string");
            layer.name = lj["name"].get<std::string>();
        }
        net.layers.push_back(std::move(layer));
        ++idx;
    }
    net.validate();
    return net;
}

void save_network(const std::string& path, const NetworkSpec& net) {
    json layers = json::array();
    for (const NetworkLayer& l : net.layers)
        layers.push_back(json{{"name", l.name},
                              {"il", l.shape.il},
                              {"ic", l.shape.ic},
                              {"fl", l.shape.fl},
                              {"fh", l.shape.fh},
                              {"z", l.shape.z},
                              {"s", l.shape.s},
                              {"m", l.shape.m},
                              {"host_op", host_op_name(l.host_op)}});
    write_text_file(path, json{{"layers", layers}}.dump(2) + "\n");
}

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    raise(ErrorCode::FormatError, "unknown report format '" + name + "' (want csv or json)");
}

std::string render_report(const NetworkCost& cost, ReportFormat fmt) {
    if (fmt == ReportFormat::Json) {
        json layers = json::array();
        for (const LayerCost& lc : cost.layers) layers.push_back(layer_cost_json(lc));
        const json j{{"layers", layers},
                     {"total",
                      {{"layer", "total"},
                       {"cycles", cost.cycles},
                       {"latency_ms", cost.latency_ms},
                       {"weights_bytes", cost.traffic.weight_bytes},
                       {"inputs_bytes", cost.traffic.input_bytes},
                       {"outputs_bytes", cost.traffic.output_bytes},
                       {"total_bytes", cost.traffic.total_bytes()},
                       {"nominal_macs", cost.nominal_macs},
                       {"gops", cost.gops},
                       {"utilization", cost.utilization}}}};
        return j.dump(2) + "\n";
    }

    std::string out =
        "layer,cycles,latency_ms,weights_bytes,inputs_bytes,outputs_bytes,total_bytes,"
        "nominal_macs,gops,utilization\n";
    auto row = [&out](const std::string& name, std::uint64_t cycles, double latency_ms,
                      const TrafficBreakdown& t, std::uint64_t macs, double gops, double util) {
        out += name;
        out += ',' + std::to_string(cycles);
        out += ',' + fmt_double(latency_ms);
        out += ',' + std::to_string(t.weight_bytes);
        out += ',' + std::to_string(t.input_bytes);
        out += ',' + std::to_string(t.output_bytes);
        out += ',' + std::to_string(t.total_bytes());
        out += ',' + std::to_string(macs);
        out += ',' + fmt_double(gops);
        out += ',' + fmt_double(util);
        out += '\n';
    };
    for (const LayerCost& lc : cost.layers)
        row(lc.name, lc.cycles + lc.stall_cycles + 1, lc.latency_ms, lc.traffic, lc.nominal_macs,
            lc.gops, lc.utilization);
    row("total", cost.cycles, cost.latency_ms, cost.traffic, cost.nominal_macs, cost.gops,
        cost.utilization);
    return out;
}

std::string render_trace(const DramTrace& trace) {
    if (!trace.logging)
        raise(ErrorCode::LoggingDisabled, "this run kept no DRAM log; rerun with logging on");
    std::string out = "cycle,category,group,tile,channel,filter_row,words\n";
    for (const DramRecord& r : trace.log) {
        out += std::to_string(r.cycle);
        out += ',';
        out += r.category;
        out += ',' + std::to_string(r.group);
        out += ',' + std::to_string(r.tile);
        out += ',' + std::to_string(r.channel);
        out += ',' + std::to_string(r.filter_row);
        out += ',' + std::to_string(r.words);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    write_binary(path, body);
}

std::string read_text_file(const std::string& path) { return read_binary(path); }

}  // namespace sacc
