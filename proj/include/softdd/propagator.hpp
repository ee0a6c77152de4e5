#pragma once

#include "softdd/noise.hpp"
#include "softdd/rate_model.hpp"
#include "softdd/sequences.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace softdd {

/// Q(t_s) at the commensurate times t_s = s tau, s = 0..n_periods.
struct EvolutionRecord {
  std::vector<double> times;
  std::vector<Mat3> Q;
  std::string sequence;
  std::string shape;
  std::optional<std::uint64_t> noise_seed;
  double dt = 0.0;
  int steps_per_pulse = 0;
};

/// Largest |V| dt allowed per step, in radians.
inline constexpr double kStepGuard = 0.2;

/// Solves dQ/dt = A(t) Q with
///   A(t) = -sign V(t) [n x] + (gamma_hat - 1 Tr gamma_hat) + [(B + b(t)) x].
/// Within each slot Q = U(t) W, where U is the exact control rotation of the
/// slot, and W is advanced by fixed-step RK4 under U^T (A - control) U. Delta
/// pulses are exact rotations at slot midpoints; the noise b(t) (optional) is
/// linearly interpolated. dt must divide tau_p into an even number of steps.
/// StepTooLarge if peak |V| dt exceeds kStepGuard.
EvolutionRecord propagate(const Sequence& seq, const RateModel& model, const NoiseRealization* noise,
                          int n_periods, double dt);

/// Halves dt_max until the step guard holds (and tau_p / dt is an even integer).
double auto_step(const Sequence& seq, double dt_max = 1.0 / 32.0);

/// Product of per-slot expansions R_k [1 - tau_p G0 - tau_p G1 + tau_p^2 G0^2 / 2]
/// with single-pulse cumulants G0, G1, compared with the RK4 solution over
/// one period at step dt. Returns the max-abs defect; it scales as tau_p^3.
double product_expansion_check(const Sequence& seq, const RateModel& model, double dt = 1.0 / 1024.0);

}  // namespace softdd
