#pragma once
#include <cmath>
#include <cstdint>

namespace qw {

// Counter-based generator: every draw is a pure stateless hash of
// (seed, key1, key2, key3), so fields can be generated in any traversal
// order, in parallel, with identical results.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t key_hash(std::uint64_t seed, std::uint64_t k1,
                              std::uint64_t k2, std::uint64_t k3 = 0) {
  return mix64(seed ^ mix64(k1 ^ mix64(k2 ^ mix64(k3))));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double u01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Packs a signed lattice coordinate pair into one key.
inline std::uint64_t site_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Parameter ids for per-site draws; fixed numbers keep fields reproducible.
enum class Param : std::uint64_t {
  theta1 = 1,
  theta2 = 2,
  alpha1 = 3,
  alpha2 = 4,
  beta1 = 5,
  beta2 = 6,
  phi = 7,
  binary_choice = 8,
};

// One draw for a given site/parameter/epoch. Epoch is 0 for static
// disorder and the timestep for per-step coin refreshes.
inline double site_u01(std::uint64_t seed, int a, int b, Param p,
                       std::uint64_t epoch = 0) {
  return u01(key_hash(seed, site_key(a, b),
                      static_cast<std::uint64_t>(p), epoch));
}

inline double uniform_angle(double u) {  // [-pi, pi)
  return -M_PI + 2.0 * M_PI * u;
}

}  // namespace qw
