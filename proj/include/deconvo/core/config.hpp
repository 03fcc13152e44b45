#pragma once

#include "../error.hpp"
#include "kernels.hpp"
#include "measure.hpp"
#include "partition.hpp"

#include <optional>
#include <vector>

namespace deconvo {

//! Everything an estimator needs besides the data. `psi` is the convolution
//! kernel the estimator assumes, which may differ from the one that
//! generated the data.
struct EstimatorConfig
{
  double h = 0.0;
  double a_n = 1.0;
  ConvolutionKernel psi;
  SmoothingKernel K;
  std::optional<Partition> partition;
  //! Per-block weight measures Q_{I_j}; empty means uniform on [-1,1]^{d_j}.
  std::vector<BlockMeasure> Q;
  std::size_t order = 64;
  bool fast_path = true;
  double imag_tolerance = 1e-8;

  std::size_t dim() const { return psi.dim(); }

  const Partition& require_partition() const
  {
    if (!partition)
      throw StructuralError("additive estimator needs a partition");
    return *partition;
  }

  //! Q_{I_j}, defaulting to the uniform measure of density 1.
  BlockMeasure block_measure(std::size_t j) const
  {
    const auto& p = require_partition();
    if (Q.empty())
      return BlockMeasure::uniform(p.block_dim(j));
    return Q.at(j);
  }

  void validate() const
  {
    if (!(h > 0))
      throw std::invalid_argument("bandwidth h must be positive");
    if (!(a_n > 0))
      throw std::invalid_argument("design scale a_n must be positive");
    if (order < 2)
      throw std::invalid_argument("quadrature order must be at least 2");
    if (K.dim() != psi.dim())
      throw StructuralError("smoothing and convolution kernel dimensions differ");
    if (partition) {
      if (partition->dim() != psi.dim())
        throw StructuralError("partition dimension does not match the kernel");
      if (!Q.empty()) {
        if (Q.size() != partition->size())
          throw StructuralError("one weight measure per partition block required");
        for (std::size_t j = 0; j < Q.size(); ++j)
          if (Q[j].dim() != partition->block_dim(j))
            throw StructuralError("weight measure does not conform to its block");
      }
    }
  }

  bool operator==(const EstimatorConfig&) const = default;
};

//! Rate exponents consumed by the slope diagnostics.
struct RateParameters
{
  double beta = 1.0;               // ill-posedness degree
  std::vector<double> gamma = {};  // additive gain exponents, one per block
  double s = 2.0;                  // smoothness exponent
  double r = 1.0;                  // tail exponent

  void validate() const
  {
    if (!(beta > 0) || !(s > 1) || !(r > 0))
      throw std::invalid_argument("rate parameters need beta > 0, s > 1, r > 0");
    for (double g : gamma)
      if (!(g > 0))
        throw std::invalid_argument("gamma_j must be positive");
  }
};

} // namespace deconvo
