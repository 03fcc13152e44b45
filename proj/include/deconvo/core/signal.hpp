#pragma once

#include "../error.hpp"
#include "partition.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

//! One additive term theta_{I_j}, evaluated on the coordinates of its block.
struct SignalComponent
{
  std::vector<std::size_t> axes;
  std::function<double(std::span<const double>)> fn;
  //! Points where a one-dimensional component is not differentiable; used to
  //! split convolution quadrature.
  std::vector<double> kinks = {};
};

//! theta(x) = theta_0 + sum_j theta_{I_j}(x_{I_j}).
class AdditiveSignal
{
public:
  AdditiveSignal() = default;
  AdditiveSignal(std::string id,
                 std::size_t dim,
                 double theta0,
                 std::vector<SignalComponent> components);

  const std::string& id() const { return id_; }
  std::size_t dim() const { return dim_; }
  double theta0() const { return theta0_; }
  const std::vector<SignalComponent>& components() const { return components_; }

  double component(std::size_t j, std::span<const double> block_x) const
  {
    return components_.at(j).fn(block_x);
  }

  double operator()(std::span<const double> x) const;

  //! Partition induced by the component blocks, or nullopt-equivalent empty
  //! partition when the signal has no components.
  Partition partition() const;

private:
  std::string id_;
  std::size_t dim_ = 0;
  double theta0_ = 0.0;
  std::vector<SignalComponent> components_;
};

inline AdditiveSignal::AdditiveSignal(std::string id,
                                      std::size_t dim,
                                      double theta0,
                                      std::vector<SignalComponent> components)
  : id_(std::move(id))
  , dim_(dim)
  , theta0_(theta0)
  , components_(std::move(components))
{
  std::vector<bool> used(dim_, false);
  for (const auto& c : components_) {
    if (c.axes.empty() || !c.fn)
      throw StructuralError("signal component needs axes and a function");
    for (auto a : c.axes) {
      if (a >= dim_)
        throw StructuralError("signal component axis outside dimension");
      if (used[a])
        throw StructuralError("signal components overlap");
      used[a] = true;
    }
  }
}

inline double
AdditiveSignal::operator()(std::span<const double> x) const
{
  if (x.size() != dim_)
    throw StructuralError("signal evaluated at a point of wrong dimension");
  double v = theta0_;
  std::vector<double> sub;
  for (const auto& c : components_) {
    sub.resize(c.axes.size());
    for (std::size_t t = 0; t < c.axes.size(); ++t)
      sub[t] = x[c.axes[t]];
    v += c.fn(sub);
  }
  return v;
}

inline Partition
AdditiveSignal::partition() const
{
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<bool> used(dim_, false);
  for (const auto& c : components_) {
    blocks.push_back(c.axes);
    for (auto a : c.axes)
      used[a] = true;
  }
  // coordinates the signal does not depend on form their own blocks
  for (std::size_t a = 0; a < dim_; ++a)
    if (!used[a])
      blocks.push_back({ a });
  return Partition(dim_, std::move(blocks));
}

inline double
theta_eval(const AdditiveSignal& signal, std::span<const double> x)
{
  return signal(x);
}

namespace signals {

//! exp(-(x1-0.1)^2) + exp(-(x2-0.4)^2)
inline AdditiveSignal
theta1()
{
  return { "theta1",
           2,
           0.0,
           { { { 0 },
               [](std::span<const double> x) {
                 return std::exp(-(x[0] - 0.1) * (x[0] - 0.1));
               } },
             { { 1 },
               [](std::span<const double> x) {
                 return std::exp(-(x[0] - 0.4) * (x[0] - 0.4));
               } } } };
}

//! exp(-|x1-0.4|) + 2 exp(-2 x2^2)
inline AdditiveSignal
theta2()
{
  return { "theta2",
           2,
           0.0,
           { { { 0 },
               [](std::span<const double> x) {
                 return std::exp(-std::abs(x[0] - 0.4));
               },
               { 0.4 } },
             { { 1 },
               [](std::span<const double> x) {
                 return 2.0 * std::exp(-2.0 * x[0] * x[0]);
               } } } };
}

inline AdditiveSignal
constant(std::size_t dim, double c)
{
  return { "constant", dim, c, {} };
}

inline AdditiveSignal
zero(std::size_t dim)
{
  return { "zero", dim, 0.0, {} };
}

} // namespace signals

} // namespace deconvo
