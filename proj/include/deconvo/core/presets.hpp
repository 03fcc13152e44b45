#pragma once

#include "../error.hpp"
#include "density.hpp"
#include "kernels.hpp"
#include "signal.hpp"

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace deconvo::presets {

namespace detail {

inline double
parse_number(std::string_view text, const std::string& id)
{
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("bad number '" + std::string(text) + "' in preset '" +
                                id + "'");
  return v;
}

inline std::pair<std::string_view, std::string_view>
split_id(std::string_view id)
{
  auto colon = id.find(':');
  if (colon == std::string_view::npos)
    return { id, {} };
  return { id.substr(0, colon), id.substr(colon + 1) };
}

} // namespace detail

inline AdditiveSignal
signal(const std::string& id)
{
  if (id == "theta1")
    return signals::theta1();
  if (id == "theta2")
    return signals::theta2();
  throw std::invalid_argument("unknown signal preset '" + id + "'");
}

//! "laplace:λ", "gauss:σ", "gamma:α,β" with identical parameters per axis.
inline ConvolutionKernel
kernel(const std::string& id, std::size_t dim)
{
  auto [family, params] = detail::split_id(id);
  if (params.empty())
    throw std::invalid_argument("kernel preset '" + id + "' needs parameters");
  if (family == "laplace")
    return ConvolutionKernel::laplace(dim, detail::parse_number(params, id));
  if (family == "gauss")
    return ConvolutionKernel::gaussian(dim, detail::parse_number(params, id));
  if (family == "gamma") {
    auto comma = params.find(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument("gamma preset needs 'gamma:shape,rate'");
    return ConvolutionKernel::gamma(dim,
                                    detail::parse_number(params.substr(0, comma), id),
                                    detail::parse_number(params.substr(comma + 1), id));
  }
  throw std::invalid_argument("unknown kernel preset '" + id + "'");
}

inline DensitySpec
density(const std::string& id)
{
  auto [family, params] = detail::split_id(id);
  if (family == "uniform" && params.empty())
    return DensitySpec::uniform();
  if (family == "gauss" && params.empty())
    return DensitySpec::gaussian();
  if (family == "t2" && params.empty())
    return DensitySpec::student_t2();
  if (family == "heavytail")
    return DensitySpec::heavy_tail(params.empty() ? 2.0
                                                  : detail::parse_number(params, id));
  throw std::invalid_argument("unknown density preset '" + id + "'");
}

} // namespace deconvo::presets
