#pragma once

#include <cstdint>
#include <random>

namespace fdmac {

using Rng = std::mt19937_64;

/// Independent random streams of one replica. Channel draws, traffic and
/// MAC decisions never share a generator, so two schemes run on the same
/// seed see identical topologies, fading and arrivals.
enum class Stream : std::uint64_t {
  Topology = 1,
  Channel = 2,
  Traffic = 3,
  Mac = 4,
  Demand = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace fdmac
