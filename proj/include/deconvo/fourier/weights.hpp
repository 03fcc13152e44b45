#pragma once

#include "../core/config.hpp"
#include "../core/density.hpp"
#include "../error.hpp"
#include "quadrature.hpp"
#include "transforms.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace deconvo {

//! One factor of a separable frequency integral: axis `axis` of psi, phase
//! exp(-i u t), and optionally the normalized L-factor of `measure` at u/h.
struct AxisTerm
{
  std::size_t axis;
  double t;
  const AxisMeasure* measure = nullptr;
};

//! Evaluates the estimator weight integrals over supp Phi_K = [-1,1]^dim,
//! either as products of 1-D integrals (fast path) or by full tensor
//! quadrature (naive path, kept as a test oracle).
class WeightEngine
{
public:
  explicit WeightEngine(EstimatorConfig cfg);

  const EstimatorConfig& config() const { return cfg_; }
  double h() const { return cfg_.h; }

  //! Panels per axis so that each order-M panel sees at most M/2 radians of
  //! oscillation per unit half-width.
  std::size_t panels_for(double omega) const
  {
    const double cap = 0.5 * static_cast<double>(cfg_.order);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(omega / cap)));
  }

  //! Re int_{-1}^{1} exp(-iut) Phi_K(u)/Phi_psi_a(u/h) [L(u/h)/|Q|] du.
  double axis_integral(std::size_t axis, double t, const AxisMeasure* measure = nullptr) const;

  //! Product integral over all listed axes; naive when `fast` is false.
  double integral(std::span<const AxisTerm> terms, bool fast) const;
  double integral(std::span<const AxisTerm> terms) const
  {
    return integral(terms, cfg_.fast_path);
  }

  //! (n a_n h 2 pi)^{-dim}
  double fd_scale(std::size_t dim, std::size_t n) const
  {
    return std::pow(static_cast<double>(n) * cfg_.a_n * cfg_.h * 2.0 * std::numbers::pi,
                    -static_cast<double>(dim));
  }

  //! [n max{f(X), f(1/a_n)} (2 pi h)^d]^{-1}
  double rd_scale(std::span<const double> X, std::size_t n, const DensitySpec& f) const;

  double fd_full(std::span<const double> x, std::span<const double> z, std::size_t n) const;
  double fd_block(std::size_t j,
                  std::span<const double> xj,
                  std::span<const double> zj,
                  std::size_t n) const;
  double rd(std::span<const double> x,
            std::span<const double> X,
            std::size_t n,
            const DensitySpec& f) const;
  double rd_additive(std::size_t j,
                     std::span<const double> xj,
                     std::span<const double> X,
                     std::size_t n,
                     const DensitySpec& f) const;
  //! Weight of observation X in the constant estimate c-hat (every axis
  //! integrated against its Q).
  double rd_constant(std::span<const double> X, std::size_t n, const DensitySpec& f) const;

  //! Normalized per-axis weight measure (from the block that owns the axis).
  const AxisMeasure& axis_measure(std::size_t axis) const { return measures_.at(axis); }

private:
  void check_residual(std::complex<double> v, double abs_mass) const
  {
    if (std::abs(v.imag()) > cfg_.imag_tolerance * abs_mass)
      throw NumericalError("imaginary residual " + format_double(v.imag()) +
                           " exceeds tolerance (integral magnitude " +
                           format_double(abs_mass) + ")");
  }

  double omega(const AxisTerm& term) const
  {
    double w = std::abs(term.t);
    if (term.measure)
      w += term.measure->radius() / cfg_.h;
    return w;
  }

  EstimatorConfig cfg_;
  std::vector<double> base_nodes_;
  std::vector<std::vector<double>> base_wp_; // per axis: weight * profile
  std::vector<AxisMeasure> measures_;        // per axis, normalized to mass 1
};

inline WeightEngine::WeightEngine(EstimatorConfig cfg)
  : cfg_(std::move(cfg))
{
  cfg_.validate();
  const auto& rule = gauss_legendre(cfg_.order);
  base_nodes_ = rule.nodes;
  base_wp_.resize(cfg_.dim());
  for (std::size_t a = 0; a < cfg_.dim(); ++a) {
    base_wp_[a].resize(rule.order());
    for (std::size_t i = 0; i < rule.order(); ++i)
      base_wp_[a][i] = rule.weights[i] * axis_profile(cfg_.psi, a, cfg_.K, cfg_.h, rule.nodes[i]);
  }
  if (cfg_.partition) {
    measures_.resize(cfg_.dim());
    for (std::size_t j = 0; j < cfg_.partition->size(); ++j) {
      const auto Q = cfg_.block_measure(j);
      const auto& block = cfg_.partition->block(j);
      for (std::size_t i = 0; i < block.size(); ++i) {
        const auto& m = Q.axes[i];
        const double mass = m.mass();
        if (!(mass > 0))
          throw std::invalid_argument("weight measure has zero mass");
        auto dens = m.densities();
        for (auto& v : dens)
          v /= mass;
        measures_[block[i]] = AxisMeasure(m.edges(), std::move(dens));
      }
    }
  }
}

inline double
WeightEngine::axis_integral(std::size_t axis, double t, const AxisMeasure* measure) const
{
  const AxisTerm term{ axis, t, measure };
  const std::size_t panels = panels_for(omega(term));
  std::complex<double> sum = 0.0;
  double abs_mass = 0.0;
  auto accumulate = [&](double u, double wp) {
    std::complex<double> v = wp * std::polar(1.0, -u * t);
    if (measure)
      v *= measure->transform(u / cfg_.h);
    sum += v;
    abs_mass += std::abs(v);
  };
  if (panels == 1) {
    for (std::size_t i = 0; i < base_nodes_.size(); ++i)
      accumulate(base_nodes_[i], base_wp_.at(axis)[i]);
  } else {
    const auto rule = composite_rule(-1.0, 1.0, cfg_.order, panels);
    for (std::size_t i = 0; i < rule.order(); ++i)
      accumulate(rule.nodes[i],
                 rule.weights[i] * axis_profile(cfg_.psi, axis, cfg_.K, cfg_.h, rule.nodes[i]));
  }
  check_residual(sum, abs_mass);
  return sum.real();
}

inline double
WeightEngine::integral(std::span<const AxisTerm> terms, bool fast) const
{
  if (fast) {
    double v = 1.0;
    for (const auto& term : terms)
      v *= axis_integral(term.axis, term.t, term.measure);
    return v;
  }

  const std::size_t k = terms.size();
  std::vector<std::size_t> axes(k), panels(k);
  std::vector<double> phase(k);
  BlockMeasure q;
  std::vector<std::size_t> q_slots;
  for (std::size_t i = 0; i < k; ++i) {
    axes[i] = terms[i].axis;
    phase[i] = terms[i].t;
    panels[i] = panels_for(omega(terms[i]));
    if (terms[i].measure) {
      q.axes.push_back(*terms[i].measure);
      q_slots.push_back(i);
    }
  }
  const auto psi = cfg_.psi.marginal(axes);
  const auto K = cfg_.K.with_dim(k);
  const double h = cfg_.h;
  std::vector<double> scaled(k), y(q_slots.size());
  auto integrand = [&](std::span<const double> u) -> std::complex<double> {
    const double kv = transform_eval(K, u).real();
    if (kv == 0.0)
      return 0.0;
    for (std::size_t i = 0; i < k; ++i)
      scaled[i] = u[i] / h;
    const auto den = transform_eval(psi, scaled);
    if (std::abs(den) < 1e-14)
      throw NumericalError("|Phi_psi| below 1e-14 (division singularity)");
    double dot = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      dot += u[i] * phase[i];
    std::complex<double> v = std::polar(kv, -dot) / den;
    if (!q_slots.empty()) {
      for (std::size_t s = 0; s < q_slots.size(); ++s)
        y[s] = scaled[q_slots[s]];
      v *= l_functional(q, y);
    }
    return v;
  };
  const auto box = Box::cube(k, 1.0);
  const auto v = tensor_quadrature(integrand, box, { cfg_.order }, panels);
  if (std::abs(v.imag()) > cfg_.imag_tolerance * std::abs(v.real())) {
    const auto abs_mass = tensor_quadrature(
      [&](std::span<const double> u) -> std::complex<double> { return std::abs(integrand(u)); },
      box,
      { cfg_.order },
      panels);
    check_residual(v, abs_mass.real());
  }
  return v.real();
}

inline double
WeightEngine::rd_scale(std::span<const double> X, std::size_t n, const DensitySpec& f) const
{
  const double level = std::max(f.density(X, cfg_.a_n), f.truncation_level(X.size(), cfg_.a_n));
  if (!(level > 0))
    throw NumericalError("design density vanishes at X_k and at 1/a_n (truncation)");
  return 1.0 / (static_cast<double>(n) * level *
                std::pow(2.0 * std::numbers::pi * cfg_.h, static_cast<double>(X.size())));
}

inline double
WeightEngine::fd_full(std::span<const double> x, std::span<const double> z, std::size_t n) const
{
  if (x.size() != cfg_.dim() || z.size() != cfg_.dim())
    throw StructuralError("weight arguments do not match the kernel dimension");
  std::vector<AxisTerm> terms;
  for (std::size_t a = 0; a < x.size(); ++a)
    terms.push_back({ a, (x[a] - z[a]) / cfg_.h });
  return fd_scale(x.size(), n) * integral(terms);
}

inline double
WeightEngine::fd_block(std::size_t j,
                       std::span<const double> xj,
                       std::span<const double> zj,
                       std::size_t n) const
{
  const auto& block = cfg_.require_partition().block(j);
  if (xj.size() != block.size() || zj.size() != block.size())
    throw StructuralError("block weight arguments do not match the block dimension");
  std::vector<AxisTerm> terms;
  for (std::size_t i = 0; i < block.size(); ++i)
    terms.push_back({ block[i], (xj[i] - zj[i]) / cfg_.h });
  return fd_scale(block.size(), n) * integral(terms);
}

inline double
WeightEngine::rd(std::span<const double> x,
                 std::span<const double> X,
                 std::size_t n,
                 const DensitySpec& f) const
{
  if (x.size() != cfg_.dim() || X.size() != cfg_.dim())
    throw StructuralError("weight arguments do not match the kernel dimension");
  const double scale = rd_scale(X, n, f);
  std::vector<AxisTerm> terms;
  for (std::size_t a = 0; a < x.size(); ++a)
    terms.push_back({ a, (x[a] - X[a]) / cfg_.h });
  return scale * integral(terms);
}

inline double
WeightEngine::rd_additive(std::size_t j,
                          std::span<const double> xj,
                          std::span<const double> X,
                          std::size_t n,
                          const DensitySpec& f) const
{
  const auto& p = cfg_.require_partition();
  const auto& block = p.block(j);
  if (xj.size() != block.size() || X.size() != cfg_.dim())
    throw StructuralError("additive weight arguments do not match the partition");
  const double scale = rd_scale(X, n, f);
  std::vector<AxisTerm> terms;
  for (std::size_t i = 0; i < block.size(); ++i)
    terms.push_back({ block[i], (xj[i] - X[block[i]]) / cfg_.h });
  for (auto a : p.complement(j))
    terms.push_back({ a, -X[a] / cfg_.h, &measures_[a] });
  return scale * integral(terms);
}

inline double
WeightEngine::rd_constant(std::span<const double> X, std::size_t n, const DensitySpec& f) const
{
  cfg_.require_partition();
  if (X.size() != cfg_.dim())
    throw StructuralError("weight argument does not match the kernel dimension");
  const double scale = rd_scale(X, n, f);
  std::vector<AxisTerm> terms;
  for (std::size_t a = 0; a < X.size(); ++a)
    terms.push_back({ a, -X[a] / cfg_.h, &measures_[a] });
  return scale * integral(terms);
}

} // namespace deconvo
