#ifndef SACC_ARCH_HPP
#define SACC_ARCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sacc/error.hpp"

namespace sacc {

// Geometry of one convolution layer.  `ol` is derived, never stored by hand;
// use validate_layer() to construct a checked instance.
struct LayerShape {
    std::uint32_t il = 0;  // input rows == cols (square maps)
    std::uint32_t ic = 0;  // input channels
    std::uint32_t fl = 0;  // filter cols
    std::uint32_t fh = 0;  // filter rows
    std::uint32_t z = 0;   // zero padding on each border
    std::uint32_t s = 0;   // stride
    std::uint32_t m = 0;   // filter count == output channels
    std::uint32_t ol = 0;  // output rows == cols, derived

    std::uint32_t oc() const { return m; }
    std::uint64_t nominal_macs() const {
        return static_cast<std::uint64_t>(ol) * ol * m * fl * fh * ic;
    }
    bool operator==(const LayerShape&) const = default;
};

// Raw (unchecked) layer parameters as read from a config file.
struct LayerParams {
    std::uint32_t il = 0, ic = 0, fl = 0, fh = 0, z = 0, s = 1, m = 0;
};

// Validates parameters and derives ol = (il - fl + 2z)/s + 1.
// Throws NonPositive / NonIntegerOutput on bad geometry.
LayerShape validate_layer(const LayerParams& p);

// Hardware configuration.  Default values model the reference accelerator:
// 64 convolution units, 3 multipliers each, two 448x32b SRAM banks per unit,
// 16-bit data at 200 MHz.
struct ArchConfig {
    std::uint32_t u = 64;               // parallel convolution units
    std::uint32_t n = 3;                // multipliers (filter width) per unit
    std::uint32_t sram_depth = 448;     // words per output SRAM bank
    std::uint32_t sram_word_bits = 32;  // accumulator / SRAM word width
    std::uint32_t data_bits = 16;       // feature / weight width
    double clock_hz = 200e6;
    std::uint32_t drain_words_per_cycle = 1;  // SRAM->DRAM bandwidth per bank
    std::uint32_t out_shift = 0;              // right shift applied on readout

    std::uint32_t word_bytes() const { return (data_bits + 7) / 8; }
    bool operator==(const ArchConfig&) const = default;
};

// Throws NonPositive / WidthOutOfRange / ShiftOutOfRange on bad configs.
void validate_arch(const ArchConfig& a);

// True when `a` matches the reference configuration that the published
// performance figures assume (out_shift and drain bandwidth excluded: they
// do not change latency or traffic at the default operating point).
bool is_reference_arch(const ArchConfig& a);

// Fixed-point arithmetic rules shared by the golden model and the cycle
// engine.  Accumulation wraps (two's complement) at acc_bits; readout is an
// arithmetic right shift by out_shift followed by saturation to data_bits.
struct FixedPointRules {
    std::uint32_t data_bits = 16;
    std::uint32_t acc_bits = 32;
    std::uint32_t out_shift = 0;

    static std::int64_t wrap_to(std::int64_t v, std::uint32_t bits) {
        if (bits >= 64) return v;
        const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
        const std::uint64_t sign = std::uint64_t{1} << (bits - 1);
        const std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
        return static_cast<std::int64_t>(u ^ sign) - static_cast<std::int64_t>(sign);
    }

    std::int64_t wrap_acc(std::int64_t v) const { return wrap_to(v, acc_bits); }

    // a is an already-wrapped accumulator value, b any partial product.
    std::int64_t acc_add(std::int64_t a, std::int64_t b) const { return wrap_acc(a + b); }

    std::int64_t product(std::int16_t x, std::int16_t w) const {
        // |x*w| <= 2^(2*data_bits-2), so the product never overflows its
        // natural 2*data_bits width; wrapping happens on accumulation.
        return static_cast<std::int64_t>(x) * static_cast<std::int64_t>(w);
    }

    std::int16_t requantize(std::int64_t acc) const {
        const std::int64_t shifted = wrap_acc(acc) >> out_shift;  // floor
        const std::int64_t hi = (std::int64_t{1} << (data_bits - 1)) - 1;
        const std::int64_t lo = -hi - 1;
        if (shifted > hi) return static_cast<std::int16_t>(hi);
        if (shifted < lo) return static_cast<std::int16_t>(lo);
        return static_cast<std::int16_t>(shifted);
    }
};

FixedPointRules rules_for(const ArchConfig& a);

// Host-side post-processing applied between layers of a network.
enum class HostOp {
    None,
    Relu,
    ReluMaxpool2x2,
};

const char* host_op_name(HostOp op);
HostOp host_op_from_name(const std::string& name);  // throws FormatError

struct NetworkLayer {
    LayerShape shape;
    HostOp host_op = HostOp::None;
    std::string name;
};

struct NetworkSpec {
    std::vector<NetworkLayer> layers;

    // Checks layer-to-layer chaining: channels carry over and spatial sizes
    // agree with the host op between consecutive layers.  Throws
    // ChainMismatch / OddDimension.
    void validate() const;
};

// The 13 convolution layers of the 16-layer reference network (the fully
// connected tail is not modeled).
NetworkSpec vgg16_conv_preset();

}  // namespace sacc

#endif
