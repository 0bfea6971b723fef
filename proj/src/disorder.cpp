#include "qw2d/disorder.hpp"

#include <cmath>
#include <stdexcept>

#include "qw2d/rng.hpp"

namespace qw {

namespace {

double angle_draw(std::uint64_t seed, int i1, int i2, Param p, std::uint64_t epoch) {
  return uniform_angle(site_u01(seed, i1, i2, p, epoch));
}

}  // namespace

CoinField gen_phase_disorder(int l1, int l2, const FixedAngles& fixed,
                             std::uint64_t seed, std::uint64_t epoch) {
  CoinField c = CoinField::constant(l1, l2, fixed);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1)
      c.phi[c.at(i1, i2)] = angle_draw(seed, i1, i2, Param::phi, epoch);
  return c;
}

CoinField gen_magnetic_disorder(int l1, int l2, const FixedAngles& fixed,
                                std::uint64_t seed, std::uint64_t epoch) {
  CoinField c = CoinField::constant(l1, l2, fixed);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1) {
      const size_t k = c.at(i1, i2);
      c.alpha1[k] = angle_draw(seed, i1, i2, Param::alpha1, epoch);
      c.alpha2[k] = angle_draw(seed, i1, i2, Param::alpha2, epoch);
      c.beta1[k] = angle_draw(seed, i1, i2, Param::beta1, epoch);
      c.beta2[k] = angle_draw(seed, i1, i2, Param::beta2, epoch);
    }
  return c;
}

CoinField gen_haar(int l1, int l2, std::uint64_t seed, std::uint64_t epoch) {
  CoinField c(l1, l2);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1) {
      const size_t k = c.at(i1, i2);
      // theta = arcsin(sqrt(zeta)), zeta uniform on [0, 1]: Haar measure
      // on U(2) in Euler angles.
      c.theta1[k] = std::asin(std::sqrt(site_u01(seed, i1, i2, Param::theta1, epoch)));
      c.theta2[k] = std::asin(std::sqrt(site_u01(seed, i1, i2, Param::theta2, epoch)));
      c.alpha1[k] = angle_draw(seed, i1, i2, Param::alpha1, epoch);
      c.alpha2[k] = angle_draw(seed, i1, i2, Param::alpha2, epoch);
      c.beta1[k] = angle_draw(seed, i1, i2, Param::beta1, epoch);
      c.beta2[k] = angle_draw(seed, i1, i2, Param::beta2, epoch);
      c.phi[k] = angle_draw(seed, i1, i2, Param::phi, epoch);
    }
  return c;
}

CoinField gen_binary(int l1, int l2, const BinaryParams& params,
                     std::uint64_t seed, std::uint64_t epoch) {
  if (params.p_a < 0.0 || params.p_a > 1.0)
    throw std::runtime_error("gen_binary: p_a outside [0, 1]");
  CoinField c(l1, l2);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1) {
      const size_t k = c.at(i1, i2);
      // Joint per-site choice: theta1 and theta2 come from the same set.
      const bool a = site_u01(seed, i1, i2, Param::binary_choice, epoch) < params.p_a;
      c.theta1[k] = a ? params.theta1_a : params.theta1_b;
      c.theta2[k] = a ? params.theta2_a : params.theta2_b;
      c.alpha1[k] = angle_draw(seed, i1, i2, Param::alpha1, epoch);
      c.alpha2[k] = angle_draw(seed, i1, i2, Param::alpha2, epoch);
      c.beta1[k] = angle_draw(seed, i1, i2, Param::beta1, epoch);
      c.beta2[k] = angle_draw(seed, i1, i2, Param::beta2, epoch);
      c.phi[k] = angle_draw(seed, i1, i2, Param::phi, epoch);
    }
  return c;
}

CoinField generate(const DisorderSpec& spec, int l1, int l2, std::uint64_t epoch) {
  switch (spec.kind) {
    case DisorderKind::fixed:
      return CoinField::constant(l1, l2, spec.fixed_angles);
    case DisorderKind::phase:
      return gen_phase_disorder(l1, l2, spec.fixed_angles, spec.seed, epoch);
    case DisorderKind::magnetic:
      return gen_magnetic_disorder(l1, l2, spec.fixed_angles, spec.seed, epoch);
    case DisorderKind::haar:
      return gen_haar(l1, l2, spec.seed, epoch);
    case DisorderKind::binary:
      return gen_binary(l1, l2, spec.binary_params, spec.seed, epoch);
  }
  throw std::runtime_error("generate: unknown disorder kind");
}

int clean_invariant(double theta1, double theta2) {
  const double v = std::sin(theta1 - theta2) * std::sin(theta1 + theta2);
  if (std::abs(v) <= 1e-12) return 0;
  return v > 0 ? +1 : -1;
}

Axis dominant_axis(double theta1, double theta2) {
  const double v = std::cos(theta1 - theta2) * std::cos(theta1 + theta2);
  if (std::abs(v) <= 1e-12) return Axis::isotropic;
  return v > 0 ? Axis::diagonal : Axis::antidiagonal;
}

std::string to_string(DisorderKind k) {
  switch (k) {
    case DisorderKind::fixed: return "fixed";
    case DisorderKind::phase: return "phase";
    case DisorderKind::magnetic: return "magnetic";
    case DisorderKind::haar: return "haar";
    case DisorderKind::binary: return "binary";
  }
  return "?";
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::diagonal: return "diagonal";
    case Axis::antidiagonal: return "antidiagonal";
    case Axis::isotropic: return "isotropic";
  }
  return "?";
}

}  // namespace qw
