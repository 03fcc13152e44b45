#pragma once

#include "../error.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace deconvo {

enum class NoiseKind
{
  iid,
  ma_sequence, // eps_t = Z_t + beta_1 Z_{t-1} + ... + beta_q Z_{t-q}
  ma_lattice   // eps_k = sum_{r in {-q..q}^d} beta_r Z_{k-r}
};

//! Gaussian error law; sigma2 is the innovation variance.
struct NoiseSpec
{
  NoiseKind kind = NoiseKind::iid;
  double sigma2 = 1.0;
  std::size_t q = 0;
  std::size_t dim = 0;       // lattice dimension (ma_lattice only)
  std::vector<double> beta;  // beta_1..beta_q, or (2q+1)^d lattice array

  static NoiseSpec iid(double sigma2) { return { NoiseKind::iid, sigma2, 0, 0, {} }; }

  static NoiseSpec ma_sequence(double sigma2, std::vector<double> beta)
  {
    NoiseSpec s{ NoiseKind::ma_sequence, sigma2, beta.size(), 0, std::move(beta) };
    s.validate();
    return s;
  }

  //! Coefficients in lexicographic order over r in {-q..q}^d, first axis
  //! slowest.
  static NoiseSpec ma_lattice(double sigma2,
                              std::size_t q,
                              std::size_t dim,
                              std::vector<double> beta)
  {
    NoiseSpec s{ NoiseKind::ma_lattice, sigma2, q, dim, std::move(beta) };
    s.validate();
    return s;
  }

  std::size_t lattice_coefficient_count() const
  {
    std::size_t c = 1;
    for (std::size_t i = 0; i < dim; ++i)
      c *= 2 * q + 1;
    return c;
  }

  void validate() const
  {
    if (!(sigma2 >= 0))
      throw std::invalid_argument("noise variance sigma2 must be nonnegative");
    switch (kind) {
      case NoiseKind::iid:
        break;
      case NoiseKind::ma_sequence:
        if (beta.size() != q)
          throw StructuralError("ma-sequence needs exactly q coefficients");
        break;
      case NoiseKind::ma_lattice:
        if (dim == 0 || beta.size() != lattice_coefficient_count())
          throw StructuralError("ma-lattice coefficient array must have (2q+1)^d = " +
                                std::to_string(lattice_coefficient_count()) +
                                " entries, got " + std::to_string(beta.size()));
        break;
    }
  }

  //! Var(eps) = sigma2 * sum beta^2 (beta_0 = 1 for sequences).
  double marginal_variance() const
  {
    double s = 0;
    switch (kind) {
      case NoiseKind::iid:
        return sigma2;
      case NoiseKind::ma_sequence:
        s = 1.0;
        for (double b : beta)
          s += b * b;
        return sigma2 * s;
      case NoiseKind::ma_lattice:
        for (double b : beta)
          s += b * b;
        return sigma2 * s;
    }
    return s;
  }

  //! sum_{k,l} beta_k beta_l with beta_0 = 1 for sequences.
  double long_run_factor() const
  {
    double s = kind == NoiseKind::ma_sequence ? 1.0 : 0.0;
    if (kind == NoiseKind::iid)
      return 1.0;
    for (double b : beta)
      s += b;
    return s * s;
  }

  std::string id() const
  {
    switch (kind) {
      case NoiseKind::iid:
        return "iid";
      case NoiseKind::ma_sequence:
        return "ma-sequence";
      case NoiseKind::ma_lattice:
        return "ma-lattice";
    }
    return {};
  }

  bool operator==(const NoiseSpec&) const = default;
};

} // namespace deconvo
