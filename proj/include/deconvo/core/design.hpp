#pragma once

#include "../error.hpp"
#include "../util.hpp"
#include "density.hpp"
#include "noise.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

enum class DesignKind
{
  fixed_grid,
  random
};

//! Fixed grid: z_k = k/(n a_n), k in {-n..n}^d, N = (2n+1)^d.
//! Random: n iid locations with density f, N = n.
struct Design
{
  DesignKind kind = DesignKind::fixed_grid;
  std::size_t n = 0;
  double a_n = 1.0;
  std::size_t dim = 1;
  DensitySpec density = {};

  static Design fixed_grid(std::size_t n, double a_n, std::size_t dim)
  {
    return { DesignKind::fixed_grid, n, a_n, dim, {} };
  }
  static Design random(std::size_t n, double a_n, std::size_t dim, DensitySpec f)
  {
    return { DesignKind::random, n, a_n, dim, f };
  }

  std::size_t sample_size() const
  {
    return kind == DesignKind::fixed_grid ? LatticeIndex(n, dim).count() : n;
  }

  //! Grid spacing 1/(n a_n).
  double spacing() const { return 1.0 / (static_cast<double>(n) * a_n); }

  //! Coordinates of the 2n+1 grid values along one axis.
  std::vector<double> axis_grid() const
  {
    std::vector<double> z(2 * n + 1);
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = (static_cast<double>(i) - nn) / (nn * a_n);
    return z;
  }

  void validate() const
  {
    if (n == 0 || dim == 0)
      throw StructuralError("design needs n >= 1 and d >= 1");
    if (!(a_n > 0))
      throw std::invalid_argument("design scale a_n must be positive");
  }

  bool operator==(const Design&) const = default;
};

struct Provenance
{
  std::string signal;
  std::string kernel;
  std::string noise;
  std::uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

//! Observations (location, response). Locations are stored flat with stride
//! d; fixed-grid datasets are in lexicographic k-order.
struct Dataset
{
  Design design;
  std::vector<double> locations;
  std::vector<double> responses;
  Provenance provenance;
  std::optional<NoiseSpec> noise;

  std::size_t size() const { return responses.size(); }
  std::span<const double> location(std::size_t k) const
  {
    return { locations.data() + k * design.dim, design.dim };
  }

  void validate() const
  {
    design.validate();
    if (responses.size() != design.sample_size() ||
        locations.size() != responses.size() * design.dim)
      throw StructuralError("dataset size does not match its design");
  }

  bool operator==(const Dataset&) const = default;
};

//! Lattice locations in lexicographic order.
inline std::vector<double>
grid_locations(const Design& design)
{
  LatticeIndex idx(design.n, design.dim);
  const auto axis = design.axis_grid();
  std::vector<double> out(idx.count() * design.dim);
  std::vector<std::size_t> offs;
  for (std::size_t k = 0; k < idx.count(); ++k) {
    idx.offsets(k, offs);
    for (std::size_t i = 0; i < design.dim; ++i)
      out[k * design.dim + i] = axis[offs[i]];
  }
  return out;
}

} // namespace deconvo
