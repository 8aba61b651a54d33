#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lsmap {

/// splitmix64 finalizer; good avalanche, used for seed derivation only.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and a path of indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
  return s;
}

using RngEngine = std::mt19937_64;

inline RngEngine make_engine(std::uint64_t seed) { return RngEngine(seed); }

}  // namespace lsmap
