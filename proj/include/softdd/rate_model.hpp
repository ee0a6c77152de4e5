#pragma once

#include "softdd/core.hpp"

namespace softdd {

/// Markovian rates and the slow field entering the Bloch equation
///
///   dR/dt = [B x R] + (gamma_hat - 1 Tr gamma_hat) R = -Gamma_hat R.
///
/// Rates are in units of 1/tau_p. `R_vec` (the antisymmetric, thermal part)
/// is stored but never propagated.
struct RateModel {
  Mat3 gamma_hat = Mat3::Zero();
  Vec3 R_vec = Vec3::Zero();
  Vec3 B = Vec3::Zero();

  /// gamma_hat = diag(gamma, gamma, gamma_phi): T1^-1 = 2 gamma, T2^-1 = gamma + gamma_phi.
  static RateModel nmr(double gamma, double gamma_phi, const Vec3& B = Vec3::Zero());

  /// Throws IndefiniteRates unless gamma_hat is symmetric and non-negative.
  void validate() const;

  bool is_nmr(double tol = 1e-12) const;
  double gamma() const { return gamma_hat(0, 0); }
  double gamma_phi() const { return gamma_hat(2, 2); }

  /// Rates and field multiplied by `factor` (equivalent to rescaling tau_p).
  RateModel scaled(double factor) const;
  RateModel with_field(const Vec3& field) const;
};

/// Gamma_hat = (1 Tr gamma_hat - gamma_hat) - [B x].
Mat3 build_generator(const RateModel& model);

/// (2/3)(2 gamma + gamma_phi) 1, the fully redistributed NMR generator.
Mat3 symmetrized_target(const RateModel& model);

/// Longitudinal rate under sequence 4p of pulses with the given upsilon2.
double effective_T1_4p(const RateModel& model, double upsilon2);

}  // namespace softdd
