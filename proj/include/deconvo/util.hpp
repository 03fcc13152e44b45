#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace deconvo {

//! Shortest decimal text that parses back to exactly the same double.
inline std::string
format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

//! Row-major iteration over the lattice {-n..n}^d, first axis slowest.
class LatticeIndex
{
public:
  LatticeIndex(std::size_t n, std::size_t dim)
    : n_(n)
    , dim_(dim)
    , side_(2 * n + 1)
  {
    count_ = 1;
    for (std::size_t i = 0; i < dim; ++i)
      count_ *= side_;
  }

  std::size_t side() const { return side_; }
  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }

  //! Offsets k_i + n in [0, 2n] for flat index `flat`.
  void offsets(std::size_t flat, std::vector<std::size_t>& out) const
  {
    out.resize(dim_);
    for (std::size_t i = dim_; i-- > 0;) {
      out[i] = flat % side_;
      flat /= side_;
    }
  }

  std::size_t flat(const std::vector<std::size_t>& offs) const
  {
    std::size_t f = 0;
    for (std::size_t i = 0; i < dim_; ++i)
      f = f * side_ + offs[i];
    return f;
  }

private:
  std::size_t n_;
  std::size_t dim_;
  std::size_t side_;
  std::size_t count_;
};

} // namespace deconvo
