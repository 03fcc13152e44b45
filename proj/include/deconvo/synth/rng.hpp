#pragma once

#include <cstdint>
#include <random>

namespace deconvo {

using Rng = std::mt19937_64;

inline std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Independent stream seed for (master, stream); order-free so replicate r
//! gets the same numbers under any schedule.
inline std::uint64_t
derive_seed(std::uint64_t master, std::uint64_t stream)
{
  return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1));
}

//! Sub-streams of one dataset draw.
namespace streams {
inline constexpr std::uint64_t locations = 1;
inline constexpr std::uint64_t noise = 2;
} // namespace streams

} // namespace deconvo
