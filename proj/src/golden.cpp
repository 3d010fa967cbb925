#include "sacc/golden.hpp"

#include <algorithm>
#include <string>

namespace sacc {

Tensor golden_conv(const LayerShape& layer, const Tensor& input, const FilterSet& filters,
                   const FixedPointRules& rules) {
    if (input.channels != layer.ic || input.rows != layer.il || input.cols != layer.il)
        raise(ErrorCode::ShapeMismatch,
              "input is " + std::to_string(input.channels) + "x" + std::to_string(input.rows) +
                  "x" + std::to_string(input.cols) + ", layer wants " + std::to_string(layer.ic) +
                  "x" + std::to_string(layer.il) + "x" + std::to_string(layer.il));
    filters.check_consistent();
    if (!filters.matches(layer))
        raise(ErrorCode::ShapeMismatch, "filter set does not match the layer shape");

    Tensor out = Tensor::zeros(layer.oc(), layer.ol, layer.ol);
    for (std::uint32_t k = 0; k < layer.m; ++k) {
        for (std::uint32_t row = 0; row < layer.ol; ++row) {
            for (std::uint32_t col = 0; col < layer.ol; ++col) {
                std::int64_t acc = rules.wrap_acc(filters.biases[k]);
                for (std::uint32_t c = 0; c < layer.ic; ++c) {
                    for (std::uint32_t j = 0; j < layer.fh; ++j) {
                        const std::int64_t r =
                            static_cast<std::int64_t>(row) * layer.s + j - layer.z;
                        if (r < 0 || r >= layer.il) continue;
                        for (std::uint32_t i = 0; i < layer.fl; ++i) {
                            const std::int64_t q =
                                static_cast<std::int64_t>(col) * layer.s + i - layer.z;
                            if (q < 0 || q >= layer.il) continue;
                            acc = rules.acc_add(
                                acc, rules.product(input.at(c, static_cast<std::uint32_t>(r),
                                                            static_cast<std::uint32_t>(q)),
                                                   filters.weight(k, c, j, i)));
                        }
                    }
                }
                out.at(k, row, col) = rules.requantize(acc);
            }
        }
    }
    return out;
}

Tensor host_relu(const Tensor& t) {
    Tensor out = t;
    for (auto& v : out.data) v = std::max<std::int16_t>(v, 0);
    return out;
}

Tensor host_maxpool2x2(const Tensor& t) {
    if (t.rows % 2 != 0 || t.cols % 2 != 0)
        raise(ErrorCode::OddDimension, "maxpool2x2 needs even rows/cols, got " +
                                           std::to_string(t.rows) + "x" + std::to_string(t.cols));
    Tensor out = Tensor::zeros(t.channels, t.rows / 2, t.cols / 2);
    for (std::uint32_t c = 0; c < t.channels; ++c)
        for (std::uint32_t r = 0; r < out.rows; ++r)
            for (std::uint32_t q = 0; q < out.cols; ++q)
                out.at(c, r, q) = std::max(
                    std::max(t.at(c, 2 * r, 2 * q), t.at(c, 2 * r, 2 * q + 1)),
                    std::max(t.at(c, 2 * r + 1, 2 * q), t.at(c, 2 * r + 1, 2 * q + 1)));
    return out;
}

Tensor apply_host_op(HostOp op, const Tensor& t) {
    switch (op) {
        case HostOp::None: return t;
        case HostOp::Relu: return host_relu(t);
        case HostOp::ReluMaxpool2x2: return host_maxpool2x2(host_relu(t));
    }
    return t;
}

}  // namespace sacc
