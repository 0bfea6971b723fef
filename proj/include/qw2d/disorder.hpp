#pragma once
#include <cstdint>
#include <string>

#include "qw2d/lattice.hpp"

namespace qw {

enum class DisorderKind { fixed, phase, magnetic, haar, binary };

struct BinaryParams {
  double theta1_a = 0, theta2_a = 0;
  double theta1_b = 0, theta2_b = 0;
  double p_a = 1.0;
};

// Recipe plus seed for generating a CoinField. The kind determines which
// parameter fields are randomized.
struct DisorderSpec {
  DisorderKind kind = DisorderKind::fixed;
  FixedAngles fixed_angles;
  BinaryParams binary_params;
  std::uint64_t seed = 0;
};

// All generators are deterministic pure functions of (extents, params,
// seed); epoch selects an independent refresh of the random fields and is
// nonzero only for per-timestep coin renewal.
CoinField gen_phase_disorder(int l1, int l2, const FixedAngles& fixed,
                             std::uint64_t seed, std::uint64_t epoch = 0);
CoinField gen_magnetic_disorder(int l1, int l2, const FixedAngles& fixed,
                                std::uint64_t seed, std::uint64_t epoch = 0);
CoinField gen_haar(int l1, int l2, std::uint64_t seed, std::uint64_t epoch = 0);
CoinField gen_binary(int l1, int l2, const BinaryParams& params,
                     std::uint64_t seed, std::uint64_t epoch = 0);

CoinField generate(const DisorderSpec& spec, int l1, int l2,
                   std::uint64_t epoch = 0);

// Bulk invariant of the clean walk: sgn[sin(t1 - t2) sin(t1 + t2)];
// 0 flags a critical line.
int clean_invariant(double theta1, double theta2);

enum class Axis { diagonal, antidiagonal, isotropic };

// Dominant spreading direction: sign of cos(t1 - t2) cos(t1 + t2);
// + is x + y (diagonal), - is x - y (antidiagonal).
Axis dominant_axis(double theta1, double theta2);

std::string to_string(DisorderKind k);
std::string to_string(Axis a);

}  // namespace qw
