#pragma once

#include "softdd/pulse_shapes.hpp"

#include <functional>

namespace softdd {

/// Second-order characterization of a symmetric pulse. With the symmetrized
/// angle p(t) = phi(t) - phi0/2 and averages over the pulse (t, t' in units of
/// tau_p, t' < t for the double averages):
///
///   upsilon  = <cos p>            upsilon2 = <cos 2p>
///   zeta     = <(t - 1/2) sin p>  zeta2    = <(t - 1/2) sin 2p>
///   alpha    = <<sin(p - p')>>    alpha2   = <<sin(2p - 2p')>>
///   mu       = <<sin(2p - p')>>
///
/// Coefficient tables usually list alpha/2 and alpha2/2; see half_alpha().
struct ShapeCoefficients {
  double upsilon = 0.0;
  double upsilon2 = 0.0;
  double alpha = 0.0;
  double alpha2 = 0.0;
  double zeta = 0.0;
  double zeta2 = 0.0;
  double mu = 0.0;

  double half_alpha() const { return 0.5 * alpha; }
  double half_alpha2() const { return 0.5 * alpha2; }
};

struct QuadratureOptions {
  double tolerance = 1e-10;  // absolute, between successive refinements
  int panels = 32;           // initial panel count (8-point Gauss per panel)
  int max_refinements = 6;
};

/// (1/tau_p) int_0^tau_p f(t) dt.
double pulse_average(const std::function<double(double)>& f, double tau_p = 1.0,
                     const QuadratureOptions& opts = {});

/// (1/tau_p^2) int_0^tau_p dt int_0^t dt' f(t, t').
double double_average(const std::function<double(double, double)>& f, double tau_p = 1.0,
                      const QuadratureOptions& opts = {});

/// Closed forms for an instantaneous pulse of angle phi0.
ShapeCoefficients delta_coefficients(double phi0);

/// All seven coefficients. Delta shapes use the closed forms; other shapes
/// must be symmetric (AsymmetricPulse otherwise). Double averages use the
/// separable form sin(a - b) = sin a cos b - cos a sin b with running
/// integrals, so the cost is linear in the node count.
ShapeCoefficients compute_coefficients(const PulseShape& shape, const QuadratureOptions& opts = {});

/// Same quantities through the generic nested double_average. Quadratic in the
/// node count; used as an independent cross-check.
ShapeCoefficients compute_coefficients_nested(const PulseShape& shape,
                                              const QuadratureOptions& opts = {});

/// Fixed-grid evaluation without refinement, for optimizer inner loops.
ShapeCoefficients coefficients_on_grid(const PulseShape& shape, int panels);

}  // namespace softdd
