#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace netes {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a key path,
// e.g. derive_seed(master, {kPerturbStream, iteration, agent}).
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

// Stream tags. Distinct constants keep streams disjoint.
inline constexpr std::uint64_t kPerturbStream = 0x7065727475726221ULL;
inline constexpr std::uint64_t kBroadcastStream = 0x62726f6164636173ULL;
inline constexpr std::uint64_t kInitStream = 0x696e697469616c21ULL;
inline constexpr std::uint64_t kEvalStream = 0x6576616c75617465ULL;
inline constexpr std::uint64_t kGraphStream = 0x6772617068736565ULL;

}  // namespace netes
