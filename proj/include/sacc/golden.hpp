#ifndef SACC_GOLDEN_HPP
#define SACC_GOLDEN_HPP

#include "sacc/arch.hpp"
#include "sacc/tensor.hpp"

namespace sacc {

// Reference convolution: direct evaluation of
//   y_k(m,n) = b_k + sum_c sum_j sum_i x_c(m*s + j - z, n*s + i - z) * w_kc(j,i)
// with zero padding, wraparound accumulation and requantized readout.  This
// is the oracle the cycle engine is checked against; it deliberately shares
// no dataflow logic with the engine.
Tensor golden_conv(const LayerShape& layer, const Tensor& input,
                   const FilterSet& filters, const FixedPointRules& rules);

// Host-side ops applied between layers.
Tensor host_relu(const Tensor& t);
// 2x2 non-overlapping max pooling; throws OddDimension on odd rows/cols.
Tensor host_maxpool2x2(const Tensor& t);
Tensor apply_host_op(HostOp op, const Tensor& t);

}  // namespace sacc

#endif
