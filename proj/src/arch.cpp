#include "sacc/arch.hpp"

#include <string>

namespace sacc {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonIntegerOutput: return "NonIntegerOutput";
        case ErrorCode::NonPositive: return "NonPositive";
        case ErrorCode::ShiftOutOfRange: return "ShiftOutOfRange";
        case ErrorCode::WidthOutOfRange: return "WidthOutOfRange";
        case ErrorCode::ChainMismatch: return "ChainMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::OddDimension: return "OddDimension";
        case ErrorCode::RowTooWide: return "RowTooWide";
        case ErrorCode::UnsupportedStride: return "UnsupportedStride";
        case ErrorCode::UnsupportedPadding: return "UnsupportedPadding";
        case ErrorCode::FilterWidthMismatch: return "FilterWidthMismatch";
        case ErrorCode::EmptyRange: return "EmptyRange";
        case ErrorCode::NotDefaultConfig: return "NotDefaultConfig";
        case ErrorCode::LoggingDisabled: return "LoggingDisabled";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::MissingPath: return "MissingPath";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

LayerShape validate_layer(const LayerParams& p) {
    auto need_positive = [](std::uint32_t v, const char* field) {
        if (v == 0) raise(ErrorCode::NonPositive, std::string(field) + " must be >= 1");
    };
    need_positive(p.il, "il");
    need_positive(p.ic, "ic");
    need_positive(p.fl, "fl");
    need_positive(p.fh, "fh");
    need_positive(p.s, "s");
    need_positive(p.m, "m");

    const std::int64_t span = static_cast<std::int64_t>(p.il) - p.fl + 2 * static_cast<std::int64_t>(p.z);
    if (span < 0)
        raise(ErrorCode::NonPositive,
              "ol would be < 1 (il=" + std::to_string(p.il) + " fl=" + std::to_string(p.fl) +
                  " z=" + std::to_string(p.z) + ")");
    if (span % p.s != 0)
        raise(ErrorCode::NonIntegerOutput,
              "(il - fl + 2z) = " + std::to_string(span) + " is not divisible by s = " +
                  std::to_string(p.s));

    LayerShape shape;
    shape.il = p.il;
    shape.ic = p.ic;
    shape.fl = p.fl;
    shape.fh = p.fh;
    shape.z = p.z;
    shape.s = p.s;
    shape.m = p.m;
    shape.ol = static_cast<std::uint32_t>(span / p.s + 1);
    return shape;
}

void validate_arch(const ArchConfig& a) {
    auto need_positive = [](std::uint32_t v, const char* field) {
        if (v == 0) raise(ErrorCode::NonPositive, std::string(field) + " must be >= 1");
    };
    need_positive(a.u, "u");
    need_positive(a.n, "n");
    need_positive(a.sram_depth, "sram_depth");
    need_positive(a.drain_words_per_cycle, "drain_words_per_cycle");
    if (a.clock_hz <= 0.0) raise(ErrorCode::NonPositive, "clock_hz must be > 0");
    if (a.data_bits < 2 || a.data_bits > 32)
        raise(ErrorCode::WidthOutOfRange, "data_bits must be in [2, 32]");
    if (a.sram_word_bits < a.data_bits || a.sram_word_bits > 64)
        raise(ErrorCode::WidthOutOfRange, "sram_word_bits must be in [data_bits, 64]");
    if (a.out_shift >= a.sram_word_bits)
        raise(ErrorCode::ShiftOutOfRange, "out_shift must be < sram_word_bits");
}

bool is_reference_arch(const ArchConfig& a) {
    const ArchConfig ref;
    return a.u == ref.u && a.n == ref.n && a.sram_depth == ref.sram_depth &&
           a.sram_word_bits == ref.sram_word_bits && a.data_bits == ref.data_bits &&
           a.clock_hz == ref.clock_hz;
}

FixedPointRules rules_for(const ArchConfig& a) {
    return FixedPointRules{a.data_bits, a.sram_word_bits, a.out_shift};
}

const char* host_op_name(HostOp op) {
    switch (op) {
        case HostOp::None: return "none";
        case HostOp::Relu: return "relu";
        case HostOp::ReluMaxpool2x2: return "relu_maxpool2x2";
    }
    return "none";
}

HostOp host_op_from_name(const std::string& name) {
    if (name == "none") return HostOp::None;
    if (name == "relu") return HostOp::Relu;
    if (name == "relu_maxpool2x2") return HostOp::ReluMaxpool2x2;
    raise(ErrorCode::FormatError, "unknown host op '" + name + "'");
}

void NetworkSpec::validate() const {
    for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
        const LayerShape& cur = layers[k].shape;
        const LayerShape& next = layers[k + 1].shape;
        std::uint32_t side = cur.ol;
        if (layers[k].host_op == HostOp::ReluMaxpool2x2) {
            if (side % 2 != 0)
                raise(ErrorCode::OddDimension,
                      "layer " + std::to_string(k) + ": pooled side " + std::to_string(side) +
                          " is odd");
            side /= 2;
        }
        if (next.ic != cur.oc() || next.il != side)
            raise(ErrorCode::ChainMismatch,
                  "layer " + std::to_string(k + 1) + " expects " + std::to_string(next.ic) + "x" +
                      std::to_string(next.il) + "^2 but layer " + std::to_string(k) +
                      " produces " + std::to_string(cur.oc()) + "x" + std::to_string(side) + "^2");
    }
}

NetworkSpec vgg16_conv_preset() {
    struct Row {
        const char* name;
        std::uint32_t il, ic, m;
        HostOp op;
    };
    static const Row rows[] = {
        {"conv1_1", 224, 3, 64, HostOp::Relu},
        {"conv1_2", 224, 64, 64, HostOp::ReluMaxpool2x2},
        {"conv2_1", 112, 64, 128, HostOp::Relu},
        {"conv2_2", 112, 128, 128, HostOp::ReluMaxpool2x2},
        {"conv3_1", 56, 128, 256, HostOp::Relu},
        {"conv3_2", 56, 256, 256, HostOp::Relu},
        {"conv3_3", 56, 256, 256, HostOp::ReluMaxpool2x2},
        {"conv4_1", 28, 256, 512, HostOp::Relu},
        {"conv4_2", 28, 512, 512, HostOp::Relu},
        {"conv4_3", 28, 512, 512, HostOp::ReluMaxpool2x2},
        {"conv5_1", 14, 512, 512, HostOp::Relu},
        {"conv5_2", 14, 512, 512, HostOp::Relu},
        {"conv5_3", 14, 512, 512, HostOp::ReluMaxpool2x2},
    };
    NetworkSpec net;
    for (const Row& r : rows) {
        NetworkLayer layer;
        layer.shape = validate_layer({r.il, r.ic, 3, 3, 1, 1, r.m});
        layer.host_op = r.op;
        layer.name = r.name;
        net.layers.push_back(layer);
    }
    net.validate();
    return net;
}

}  // namespace sacc
