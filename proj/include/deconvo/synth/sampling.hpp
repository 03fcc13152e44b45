#pragma once

#include "../core/design.hpp"
#include "../core/density.hpp"
#include "../core/noise.hpp"
#include "../core/signal.hpp"
#include "../error.hpp"
#include "../util.hpp"
#include "forward.hpp"
#include "rng.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace deconvo {

inline double
density_eval(const DensitySpec& spec, std::span<const double> x, double a_n)
{
  return spec.density(x, a_n);
}

//! n iid points from the product density, flat with stride dim.
inline std::vector<double>
density_sample(const DensitySpec& spec, std::size_t n, std::size_t dim, double a_n, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<double> out(n * dim);
  switch (spec.family()) {
    case DensityFamily::gaussian: {
      std::normal_distribution<double> z;
      for (auto& v : out)
        v = z(rng);
      break;
    }
    case DensityFamily::student_t2: {
      std::student_t_distribution<double> t(2.0);
      for (auto& v : out)
        v = t(rng);
      break;
    }
    case DensityFamily::uniform:
    case DensityFamily::heavy_tail: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& v : out)
        v = spec.axis_quantile(u(rng), a_n);
      break;
    }
  }
  return out;
}

//! Noise values with the layout of the design they perturb.
struct NoiseField
{
  std::vector<double> values;
  NoiseSpec spec;
  std::uint64_t seed = 0;
};

//! Noise for `count` observations. Lattice noise needs `lattice` (n, d) with
//! count = (2n+1)^d; the innovation lattice is padded by q on every side.
inline NoiseField
gen_noise(const NoiseSpec& spec,
          std::size_t count,
          std::uint64_t seed,
          std::optional<LatticeIndex> lattice = std::nullopt)
{
  spec.validate();
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, std::sqrt(spec.sigma2));
  NoiseField field{ std::vector<double>(count), spec, seed };
  if (spec.sigma2 == 0.0)
    return field;
  switch (spec.kind) {
    case NoiseKind::iid:
      for (auto& v : field.values)
        v = z(rng);
      break;
    case NoiseKind::ma_sequence: {
      const std::size_t q = spec.q;
      std::vector<double> shocks(count + q);
      for (auto& v : shocks)
        v = z(rng);
      for (std::size_t t = 0; t < count; ++t) {
        double e = shocks[t + q];
        for (std::size_t i = 1; i <= q; ++i)
          e += spec.beta[i - 1] * shocks[t + q - i];
        field.values[t] = e;
      }
      break;
    }
    case NoiseKind::ma_lattice: {
      if (!lattice || lattice->count() != count || lattice->dim() != spec.dim)
        throw StructuralError("ma-lattice noise needs the design lattice of matching dimension");
      const std::size_t q = spec.q;
      const std::size_t side = lattice->side();
      const std::size_t n_halo = (side - 1) / 2 + q;
      const LatticeIndex halo(n_halo, spec.dim);
      const LatticeIndex coef(q, spec.dim);
      std::vector<double> shocks(halo.count());
      for (auto& v : shocks)
        v = z(rng);
      std::vector<std::size_t> k_offs, r_offs, src(spec.dim);
      for (std::size_t k = 0; k < count; ++k) {
        lattice->offsets(k, k_offs);
        double e = 0.0;
        for (std::size_t r = 0; r < coef.count(); ++r) {
          coef.offsets(r, r_offs);
          // r_offs in [0, 2q] stands for r = r_offs - q; source k - r in halo coordinates
          for (std::size_t i = 0; i < spec.dim; ++i)
            src[i] = k_offs[i] + 2 * q - r_offs[i];
          e += spec.beta[r] * shocks[halo.flat(src)];
        }
        field.values[k] = e;
      }
      break;
    }
  }
  return field;
}

inline Dataset
sample_fixed_design(const Design& design,
                    const AdditiveSignal& signal,
                    const ConvolutionKernel& psi,
                    const NoiseSpec& noise,
                    std::uint64_t seed,
                    const std::vector<double>* g_cache = nullptr)
{
  if (design.kind != DesignKind::fixed_grid)
    throw StructuralError("fixed-design sampler needs a fixed-grid design");
  design.validate();
  Dataset ds;
  ds.design = design;
  ds.locations = grid_locations(design);
  ds.responses = g_cache ? *g_cache : forward_on_lattice(signal, psi, design);
  if (ds.responses.size() != design.sample_size())
    throw StructuralError("cached forward signal does not match the design");
  const auto eps = gen_noise(noise,
                             ds.responses.size(),
                             derive_seed(seed, streams::noise),
                             LatticeIndex(design.n, design.dim));
  for (std::size_t k = 0; k < ds.responses.size(); ++k)
    ds.responses[k] += eps.values[k];
  ds.provenance = { signal.id(), psi.id(), noise.id(), seed };
  ds.noise = noise;
  return ds;
}

inline Dataset
sample_random_design(const Design& design,
                     const AdditiveSignal& signal,
                     const ConvolutionKernel& psi,
                     const NoiseSpec& noise,
                     std::uint64_t seed)
{
  if (design.kind != DesignKind::random)
    throw StructuralError("random-design sampler needs a random design");
  if (noise.kind == NoiseKind::ma_lattice)
    throw StructuralError("lattice noise needs a fixed-grid design");
  design.validate();
  Dataset ds;
  ds.design = design;
  ds.locations = density_sample(
    design.density, design.n, design.dim, design.a_n, derive_seed(seed, streams::locations));
  const ForwardSignal g(signal, psi);
  ds.responses.resize(design.n);
  for (std::size_t k = 0; k < design.n; ++k)
    ds.responses[k] = g(ds.location(k));
  const auto eps = gen_noise(noise, design.n, derive_seed(seed, streams::noise));
  for (std::size_t k = 0; k < design.n; ++k)
    ds.responses[k] += eps.values[k];
  ds.provenance = { signal.id(), psi.id(), noise.id(), seed };
  ds.noise = noise;
  return ds;
}

} // namespace deconvo
