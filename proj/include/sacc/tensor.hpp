#ifndef SACC_TENSOR_HPP
#define SACC_TENSOR_HPP

#include <cstdint>
#include <vector>

#include "sacc/arch.hpp"
#include "sacc/error.hpp"
#include "sacc/prng.hpp"

namespace sacc {

// Dense channel-major int16 feature map: data[(c*rows + r)*cols + q].
struct Tensor {
    std::uint32_t channels = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::int16_t> data;

    static Tensor zeros(std::uint32_t channels, std::uint32_t rows, std::uint32_t cols);

    std::size_t index(std::uint32_t c, std::uint32_t r, std::uint32_t q) const {
        return (static_cast<std::size_t>(c) * rows + r) * cols + q;
    }
    std::int16_t at(std::uint32_t c, std::uint32_t r, std::uint32_t q) const {
        return data[index(c, r, q)];
    }
    std::int16_t& at(std::uint32_t c, std::uint32_t r, std::uint32_t q) {
        return data[index(c, r, q)];
    }

    bool same_shape(const Tensor& o) const {
        return channels == o.channels && rows == o.rows && cols == o.cols;
    }
    bool operator==(const Tensor&) const = default;
};

// Weights for m filters of shape ic x fh x fl plus one 32-bit bias per
// filter: weights[((k*ic + c)*fh + j)*fl + i].
struct FilterSet {
    std::uint32_t m = 0;
    std::uint32_t ic = 0;
    std::uint32_t fh = 0;
    std::uint32_t fl = 0;
    std::vector<std::int16_t> weights;
    std::vector<std::int32_t> biases;

    static FilterSet zeros(std::uint32_t m, std::uint32_t ic, std::uint32_t fh,
                           std::uint32_t fl);

    std::size_t index(std::uint32_t k, std::uint32_t c, std::uint32_t j,
                      std::uint32_t i) const {
        return ((static_cast<std::size_t>(k) * ic + c) * fh + j) * fl + i;
    }
    std::int16_t weight(std::uint32_t k, std::uint32_t c, std::uint32_t j,
                        std::uint32_t i) const {
        return weights[index(k, c, j, i)];
    }
    std::int16_t& weight(std::uint32_t k, std::uint32_t c, std::uint32_t j,
                         std::uint32_t i) {
        return weights[index(k, c, j, i)];
    }

    // Throws ShapeMismatch if the buffers disagree with the header fields.
    void check_consistent() const;
    bool matches(const LayerShape& layer) const {
        return m == layer.m && ic == layer.ic && fh == layer.fh && fl == layer.fl;
    }
};

// Seeded stimuli.  Values are drawn uniformly from [lo, hi]; the defaults
// keep int32 accumulators far from wraparound for realistic layer sizes
// while still exercising signed arithmetic.
Tensor random_tensor(std::uint32_t channels, std::uint32_t rows, std::uint32_t cols,
                     std::uint64_t seed, std::int16_t lo = -64, std::int16_t hi = 64);
FilterSet random_filters(const LayerShape& layer, std::uint64_t seed,
                         std::int16_t lo = -64, std::int16_t hi = 64);

}  // namespace sacc

#endif
