#include "sacc/tensor.hpp"

#include <string>

namespace sacc {

Tensor Tensor::zeros(std::uint32_t channels, std::uint32_t rows, std::uint32_t cols) {
    Tensor t;
    t.channels = channels;
    t.rows = rows;
    t.cols = cols;
    t.data.assign(static_cast<std::size_t>(channels) * rows * cols, 0);
    return t;
}

FilterSet FilterSet::zeros(std::uint32_t m, std::uint32_t ic, std::uint32_t fh,
                           std::uint32_t fl) {
    FilterSet f;
    f.m = m;
    f.ic = ic;
    f.fh = fh;
    f.fl = fl;
    f.weights.assign(static_cast<std::size_t>(m) * ic * fh * fl, 0);
    f.biases.assign(m, 0);
    return f;
}

void FilterSet::check_consistent() const {
    const std::size_t want = static_cast<std::size_t>(m) * ic * fh * fl;
    if (weights.size() != want)
        raise(ErrorCode::ShapeMismatch,
              "filter set holds " + std::to_string(weights.size()) + " weights, header implies " +
                  std::to_string(want));
    if (biases.size() != m)
        raise(ErrorCode::ShapeMismatch,
              "filter set holds " + std::to_string(biases.size()) + " biases for m = " +
                  std::to_string(m));
}

Tensor random_tensor(std::uint32_t channels, std::uint32_t rows, std::uint32_t cols,
                     std::uint64_t seed, std::int16_t lo, std::int16_t hi) {
    Tensor t = Tensor::zeros(channels, rows, cols);
    SplitMix64 rng(seed);
    for (auto& v : t.data) v = static_cast<std::int16_t>(rng.next_in(lo, hi));
    return t;
}

FilterSet random_filters(const LayerShape& layer, std::uint64_t seed, std::int16_t lo,
                         std::int16_t hi) {
    FilterSet f = FilterSet::zeros(layer.m, layer.ic, layer.fh, layer.fl);
    SplitMix64 rng(seed);
    for (auto& v : f.weights) v = static_cast<std::int16_t>(rng.next_in(lo, hi));
    for (auto& b : f.biases) b = static_cast<std::int32_t>(rng.next_in(4 * lo, 4 * hi));
    return f;
}

}  // namespace sacc
