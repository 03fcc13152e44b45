#pragma once

#include "../error.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace deconvo {

//! Disjoint blocks I_1..I_m covering the coordinates {0..d-1} (0-based).
class Partition
{
public:
  Partition() = default;
  Partition(std::size_t dim, std::vector<std::vector<std::size_t>> blocks);

  static Partition singletons(std::size_t dim);
  static Partition single_block(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<std::size_t>& block(std::size_t j) const { return blocks_.at(j); }
  std::size_t block_dim(std::size_t j) const { return blocks_.at(j).size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }

  //! I_j^c, ascending.
  std::vector<std::size_t> complement(std::size_t j) const;
  std::size_t block_of(std::size_t axis) const { return owner_.at(axis); }

  //! "1,2;3" style with 1-based indices.
  std::string to_string() const;

  bool operator==(const Partition&) const = default;

private:
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> owner_;
};

inline Partition::Partition(std::size_t dim,
                            std::vector<std::vector<std::size_t>> blocks)
  : dim_(dim)
  , blocks_(std::move(blocks))
  , owner_(dim, blocks_.size())
{
  if (dim_ == 0)
    throw StructuralError("partition of an empty coordinate set");
  std::size_t covered = 0;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    auto& b = blocks_[j];
    if (b.empty())
      throw StructuralError("partition block " + std::to_string(j + 1) +
                            " is empty");
    std::sort(b.begin(), b.end());
    for (auto axis : b) {
      if (axis >= dim_)
        throw StructuralError("partition index " + std::to_string(axis + 1) +
                              " outside {1.." + std::to_string(dim_) + "}");
      if (owner_[axis] != blocks_.size())
        throw StructuralError("partition blocks overlap at coordinate " +
                              std::to_string(axis + 1));
      owner_[axis] = j;
      ++covered;
    }
  }
  if (covered != dim_)
    throw StructuralError("partition blocks do not cover {1.." +
                          std::to_string(dim_) + "}");
}

inline Partition
Partition::singletons(std::size_t dim)
{
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < dim; ++i)
    blocks.push_back({ i });
  return Partition(dim, std::move(blocks));
}

inline Partition
Partition::single_block(std::size_t dim)
{
  std::vector<std::size_t> all(dim);
  for (std::size_t i = 0; i < dim; ++i)
    all[i] = i;
  return Partition(dim, { all });
}

inline std::vector<std::size_t>
Partition::complement(std::size_t j) const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim_; ++i)
    if (owner_[i] != j)
      out.push_back(i);
  return out;
}

inline std::string
Partition::to_string() const
{
  std::string s;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (j)
      s += ';';
    for (std::size_t t = 0; t < blocks_[j].size(); ++t) {
      if (t)
        s += ',';
      s += std::to_string(blocks_[j][t] + 1);
    }
  }
  return s;
}

} // namespace deconvo
