#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sacc/golden.hpp"
#include "sacc/prng.hpp"

using namespace sacc;

namespace {

const FixedPointRules kPlain{16, 32, 0};

Tensor tensor3x3(std::initializer_list<int> vals) {
    Tensor t = Tensor::zeros(1, 3, 3);
    std::size_t i = 0;
    for (int v : vals) t.data[i++] = static_cast<std::int16_t>(v);
    return t;
}

// Independent check model: plain int64 arithmetic, no wrapping.  Valid as a
// cross-check whenever all sums stay inside the accumulator range.
Tensor wide_conv(const LayerShape& l, const Tensor& in, const FilterSet& f,
                 std::uint32_t out_shift) {
    Tensor out = Tensor::zeros(l.oc(), l.ol, l.ol);
    for (std::uint32_t k = 0; k < l.m; ++k)
        for (std::uint32_t row = 0; row < l.ol; ++row)
            for (std::uint32_t col = 0; col < l.ol; ++col) {
                std::int64_t acc = f.biases[k];
                for (std::uint32_t c = 0; c < l.ic; ++c)
                    for (std::uint32_t j = 0; j < l.fh; ++j)
                        for (std::uint32_t i = 0; i < l.fl; ++i) {
                            const std::int64_t r =
                                static_cast<std::int64_t>(row) * l.s + j - l.z;
                            const std::int64_t q =
                                static_cast<std::int64_t>(col) * l.s + i - l.z;
                            if (r < 0 || r >= l.il || q < 0 || q >= l.il) continue;
                            acc += static_cast<std::int64_t>(
                                       in.at(c, static_cast<std::uint32_t>(r),
                                             static_cast<std::uint32_t>(q))) *
                                   f.weight(k, c, j, i);
                        }
                std::int64_t v = acc >> out_shift;
                v = std::min<std::int64_t>(32767, std::max<std::int64_t>(-32768, v));
                out.at(k, row, col) = static_cast<std::int16_t>(v);
            }
    return out;
}

}  // namespace

TEST_CASE("hand-computed 3x3 all-ones example") {
    const LayerShape l = validate_layer({3, 1, 3, 3, 1, 1, 1});
    const Tensor in = tensor3x3({1, 2, 3, 4, 5, 6, 7, 8, 9});
    FilterSet f = FilterSet::zeros(1, 1, 3, 3);
    for (auto& w : f.weights) w = 1;

    const Tensor out = golden_conv(l, in, f, kPlain);
    // Border sums clip the window: corners see 4 taps, edges 6, center 9.
    const std::vector<std::int16_t> want = {12, 21, 16, 27, 45, 33, 24, 39, 28};
    CHECK(out.data == want);
}

TEST_CASE("identity 1x1 filter copies the input") {
    const LayerShape l = validate_layer({5, 1, 1, 1, 0, 1, 1});
    const Tensor in = random_tensor(1, 5, 5, 42);
    FilterSet f = FilterSet::zeros(1, 1, 1, 1);
    f.weights[0] = 1;
    CHECK(golden_conv(l, in, f, kPlain) == in);
}

TEST_CASE("zero input surfaces the bias through requantization") {
    const LayerShape l = validate_layer({4, 2, 3, 3, 1, 1, 3});
    const Tensor in = Tensor::zeros(2, 4, 4);
    FilterSet f = FilterSet::zeros(3, 2, 3, 3);
    f.biases = {300, 1 << 20, -70000};
    const Tensor out = golden_conv(l, in, f, kPlain);
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t q = 0; q < 4; ++q) {
            CHECK(out.at(0, r, q) == 300);
            CHECK(out.at(1, r, q) == 32767);   // saturates
            CHECK(out.at(2, r, q) == -32768);  // saturates low
        }
}

TEST_CASE("padding is equivalent to an embedded unpadded run") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto il = static_cast<std::uint32_t>(rng.next_in(3, 10));
        const auto ic = static_cast<std::uint32_t>(rng.next_in(1, 3));
        const auto m = static_cast<std::uint32_t>(rng.next_in(1, 4));
        const LayerShape padded = validate_layer({il, ic, 3, 3, 1, 1, m});
        const LayerShape embedded = validate_layer({il + 2, ic, 3, 3, 0, 1, m});
        REQUIRE(padded.ol == embedded.ol);

        const Tensor in = random_tensor(ic, il, il, rng.next());
        Tensor wide = Tensor::zeros(ic, il + 2, il + 2);
        for (std::uint32_t c = 0; c < ic; ++c)
            for (std::uint32_t r = 0; r < il; ++r)
                for (std::uint32_t q = 0; q < il; ++q)
                    wide.at(c, r + 1, q + 1) = in.at(c, r, q);

        const FilterSet f = random_filters(padded, rng.next());
        CHECK(golden_conv(padded, in, f, kPlain) == golden_conv(embedded, wide, f, kPlain));
    }
}

TEST_CASE("golden matches an independent wide-accumulator model in range") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto il = static_cast<std::uint32_t>(rng.next_in(3, 9));
        const auto ic = static_cast<std::uint32_t>(rng.next_in(1, 4));
        const auto m = static_cast<std::uint32_t>(rng.next_in(1, 5));
        const auto z = static_cast<std::uint32_t>(rng.next_in(0, 1));
        const auto shift = static_cast<std::uint32_t>(rng.next_in(0, 3));
        const LayerShape l = validate_layer({il, ic, 3, 3, z, 1, m});
        // Small values keep every sum far from the 32-bit wrap point.
        const Tensor in = random_tensor(ic, il, il, rng.next(), -20, 20);
        const FilterSet f = random_filters(l, rng.next(), -20, 20);
        const FixedPointRules rules{16, 32, shift};
        CHECK(golden_conv(l, in, f, rules) == wide_conv(l, in, f, shift));
    }
}

TEST_CASE("convolution is additive in the weights under small values") {
    SplitMix64 rng(9);
    const LayerShape l = validate_layer({6, 2, 3, 3, 1, 1, 2});
    const Tensor in = random_tensor(2, 6, 6, rng.next(), -3, 3);
    FilterSet f1 = random_filters(l, rng.next(), -3, 3);
    FilterSet f2 = random_filters(l, rng.next(), -3, 3);
    f1.biases.assign(f1.biases.size(), 0);
    f2.biases.assign(f2.biases.size(), 0);
    FilterSet sum = f1;
    for (std::size_t i = 0; i < sum.weights.size(); ++i)
        sum.weights[i] = static_cast<std::int16_t>(f1.weights[i] + f2.weights[i]);

    const Tensor y1 = golden_conv(l, in, f1, kPlain);
    const Tensor y2 = golden_conv(l, in, f2, kPlain);
    const Tensor ysum = golden_conv(l, in, sum, kPlain);
    for (std::size_t i = 0; i < ysum.data.size(); ++i)
        CHECK(ysum.data[i] == y1.data[i] + y2.data[i]);
}

TEST_CASE("golden is deterministic") {
    const LayerShape l = validate_layer({8, 3, 3, 3, 1, 1, 4});
    const Tensor in = random_tensor(3, 8, 8, 77);
    const FilterSet f = random_filters(l, 78);
    CHECK(golden_conv(l, in, f, kPlain) == golden_conv(l, in, f, kPlain));
}

TEST_CASE("shape mismatches are rejected") {
    const LayerShape l = validate_layer({4, 2, 3, 3, 1, 1, 2});
    const FilterSet f = random_filters(l, 1);
    CHECK_THROWS_WITH_AS(static_cast<void>(golden_conv(l, Tensor::zeros(2, 5, 5), f, kPlain)),
                         doctest::Contains("ShapeMismatch"), SimError);
    CHECK_THROWS_WITH_AS(static_cast<void>(golden_conv(l, Tensor::zeros(1, 4, 4), f, kPlain)),
                         doctest::Contains("ShapeMismatch"), SimError);
    FilterSet broken = f;
    broken.weights.pop_back();
    CHECK_THROWS_WITH_AS(
        static_cast<void>(golden_conv(l, Tensor::zeros(2, 4, 4), broken, kPlain)),
        doctest::Contains("ShapeMismatch"), SimError);
}

TEST_CASE("host relu and maxpool") {
    Tensor t = Tensor::zeros(1, 2, 2);
    t.data = {-1, 0, 7, -32768};
    const Tensor r = host_relu(t);
    CHECK(r.data == std::vector<std::int16_t>{0, 0, 7, 0});

    Tensor p = Tensor::zeros(1, 2, 2);
    p.data = {1, 2, 3, 4};
    const Tensor pooled = host_maxpool2x2(p);
    CHECK(pooled.rows == 1);
    CHECK(pooled.cols == 1);
    CHECK(pooled.data[0] == 4);

    const Tensor big = random_tensor(2, 224, 224, 5);
    const Tensor shrunk = apply_host_op(HostOp::ReluMaxpool2x2, big);
    CHECK(shrunk.rows == 112);
    CHECK(shrunk.cols == 112);
    CHECK(shrunk.channels == 2);

    CHECK_THROWS_WITH_AS(static_cast<void>(host_maxpool2x2(Tensor::zeros(1, 3, 4))),
                         doctest::Contains("OddDimension"), SimError);
}

TEST_CASE("negative sums obey floor semantics through the whole model") {
    // One pixel, one weight: acc = -5, shift 1 -> floor(-2.5) = -3.
    const LayerShape l = validate_layer({1, 1, 1, 1, 0, 1, 1});
    Tensor in = Tensor::zeros(1, 1, 1);
    in.data[0] = 5;
    FilterSet f = FilterSet::zeros(1, 1, 1, 1);
    f.weights[0] = -1;
    const FixedPointRules rules{16, 32, 1};
    CHECK(golden_conv(l, in, f, rules).data[0] == -3);
}
