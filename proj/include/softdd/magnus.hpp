#pragma once

#include "softdd/rate_model.hpp"
#include "softdd/sequences.hpp"
#include "softdd/shape_coeffs.hpp"

#include <string_view>

namespace softdd {

/// Leading cumulants of the average decoherence operator over one period.
struct CumulantResult {
  Mat3 gamma0 = Mat3::Zero();  // (1/tau) int Gamma(t) dt
  Mat3 gamma1 = Mat3::Zero();  // -(1/2 tau) int_{t2 > t1} [Gamma(t2), Gamma(t1)]
  double residual_norm = 0.0;  // max elementwise change under panel doubling
  double tau = 0.0;
  Mat3 period_rotation = Mat3::Identity();  // Q0(tau)
  bool periodic = true;                     // |Q0(tau) - 1| < 1e-8
};

struct CumulantOptions {
  int panels_per_pulse = 32;  // even, so delta jumps fall on panel edges
  double tolerance = 1e-10;   // relative to the generator scale
};

/// Gamma(t) = Q0^T(t) Gamma_hat Q0(t).
Mat3 interaction_generator(const Sequence& seq, const RateModel& model, double t);

/// Composite 8-point Gauss quadrature per panel; the inner integral of the
/// second cumulant is carried as a running panel sum plus a partial-panel
/// Gauss rule. Throws QuadratureNotConverged if doubling the panels changes
/// the result beyond the tolerance.
CumulantResult cumulants(const Sequence& seq, const RateModel& model,
                         const CumulantOptions& opts = {});

enum class AnalyticCase { HardPiX, SoftPiX, Soft4p, Hard4p, Seq12Nmr, Seq24Nmr, Seq48Nmr };

/// Accepts hard_pi_x, soft_pi_x, soft_4p, hard_4p, seq12_nmr, seq24_nmr,
/// seq48_nmr. UnsupportedCase otherwise.
AnalyticCase parse_analytic_case(std::string_view name);
std::string_view to_string(AnalyticCase c);

/// Closed-form leading-order matrices. Only upsilon and upsilon2 are read from
/// `coeffs`; the hard cases ignore them. The seq* cases need an NMR model.
/// seq12_nmr uses the antisymmetric field pair Gamma_yz = +B_z/6,
/// Gamma_zy = -B_z/6 (the field enters through a rotated cross matrix, which
/// is antisymmetric at every t).
Mat3 analytic_gamma0(AnalyticCase which, const RateModel& model, const ShapeCoefficients& coeffs = {});

/// S(n tau) = exp(-n tau (gamma0 + gamma1)).
Mat3 effective_evolution(const CumulantResult& cum, double n_periods);

}  // namespace softdd
