#pragma once

#include "softdd/core.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace softdd {

enum class ShapeKind { Delta, Gaussian, Fourier };

std::string_view to_string(ShapeKind kind);

/// Control waveform V(t) on [0, tau_p].
///
/// Delta: instantaneous rotation by phi0 at tau_p/2.
/// Gaussian: exp(-y^2 / 2x^2) with y = t/tau_p - 1/2, truncated to the pulse
///   interval and renormalized so the total angle is exactly phi0.
/// Fourier: V(t) = 2 pi sum_n [A_n cos(2 pi n t/tau_p) + B_n sin(2 pi n t/tau_p)] / tau_p.
///   The sine part is empty for every built-in shape; it exists so that
///   user-supplied asymmetric rows can be represented and rejected downstream.
///
/// Values are immutable once constructed.
class PulseShape {
 public:
  static PulseShape delta(double phi0, double tau_p = 1.0);
  static PulseShape gaussian(double width, double phi0, double tau_p = 1.0);
  static PulseShape fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs = {},
                            double tau_p = 1.0);

  ShapeKind kind() const { return kind_; }
  double phi0() const { return phi0_; }
  double tau_p() const { return tau_p_; }
  /// Gaussian width x as a fraction of tau_p (0 for other kinds).
  double width() const { return width_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }

  const std::string& name() const { return name_; }
  PulseShape with_name(std::string name) const;

  /// Source-data flags carried from the registry table.
  bool corrupted_source() const { return corrupted_source_; }
  bool sign_corrected() const { return sign_corrected_; }
  PulseShape with_flags(bool corrupted_source, bool sign_corrected) const;

  /// Same waveform scaled by `factor` (rotation angle phi0 * factor).
  PulseShape scaled(double factor) const;

 private:
  PulseShape() = default;

  ShapeKind kind_ = ShapeKind::Delta;
  double phi0_ = 0.0;
  double tau_p_ = 1.0;
  double width_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::string name_;
  bool corrupted_source_ = false;
  bool sign_corrected_ = false;
};

/// V(t) in units of 1/tau_p. Throws DeltaNotPointwise for Delta shapes.
double evaluate_waveform(const PulseShape& shape, double t);

/// Integrated angle phi(t) = int_0^t V. For Delta it jumps from 0 to phi0 at
/// tau_p/2 (the value at exactly tau_p/2 is phi0).
double phase(const PulseShape& shape, double t);

/// phi(t) - phi0/2, odd about the pulse midpoint for symmetric shapes.
double symmetrized_angle(const PulseShape& shape, double t);

/// max |V| over a dense sample of the pulse (infinity for Delta).
double peak_amplitude(const PulseShape& shape);

/// Largest |V(t) - V(tau_p - t)| over a fixed sample set (0 for Delta).
double symmetry_defect(const PulseShape& shape);

/// Named shape table. The built-in table mirrors the published coefficient
/// rows; a text file with the same layout can extend or override it:
///
///     # name     phi0   kind      params...          [@flags]
///     delta_pi   pi     delta
///     G010_pi    pi     gaussian  0.10
///     F1         pi     fourier   0.5 -1.419474 ...  [| B1 B2 ...]
///
/// Fourier rows must satisfy phi0 = 2 pi A0. Flags: @corrupted_source,
/// @sign_corrected.
class ShapeRegistry {
 public:
  static const ShapeRegistry& builtin();
  static ShapeRegistry parse(std::string_view table, ShapeRegistry base = {});
  static ShapeRegistry load(const std::filesystem::path& path, ShapeRegistry base = builtin());

  /// Resolves registry names plus the parametric form "delta:<angle>".
  PulseShape lookup(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;
  std::string dump() const;

 private:
  std::map<std::string, PulseShape, std::less<>> shapes_;
  std::vector<std::string> order_;
};

PulseShape catalogue_lookup(std::string_view name);

/// Table layout of the built-in registry.
std::string_view builtin_shape_table();

}  // namespace softdd
