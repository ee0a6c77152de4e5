#pragma once

#include "softdd/pulse_shapes.hpp"
#include "softdd/shape_coeffs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace softdd {

enum class Coefficient { Upsilon, Upsilon2, Alpha, Alpha2, Zeta, Zeta2, Mu };

struct Target {
  Coefficient which = Coefficient::Upsilon;
  double value = 0.0;
};

/// Parses "u,u2,a" or "u2=1/3,z2". Names: u, u2, a, a2, z, z2, mu. Values
/// default to 0 and accept the angle grammar (fractions, pi).
std::vector<Target> parse_targets(std::string_view text);
std::string_view to_string(Coefficient c);
double coefficient_value(const ShapeCoefficients& c, Coefficient which);

/// Cosine-series shape with A0 = phi0 / 2 pi, `n_harmonics` further terms and
/// endpoint smoothness s: s >= 1 imposes sum A_n = 0, s = 2 also sum n^2 A_n = 0.
struct DesignSpec {
  double phi0 = kPi;
  int n_harmonics = 7;
  int smoothness = 1;
  std::vector<Target> targets;
  std::optional<double> amplitude_bound;  // on |V|, 1/tau_p
  int restarts = 16;
  std::vector<double> initial_guess;  // A1..AN for restart 0 (projected onto the constraints)
  double tolerance = 1e-6;  // per targeted coefficient

  void validate() const;
};

struct DesignResult {
  PulseShape shape;
  ShapeCoefficients coeffs;
  double residual = 0.0;  // max |coefficient - target|
  int restart = -1;       // index of the selected restart
  int restarts = 0;
};

/// Multi-start Nelder-Mead on the coordinates left free by the smoothness
/// constraints, polished by Gauss-Newton steps. Restart r starts from a point
/// drawn with derive_seed(seed, r); the lowest objective wins, and restarts
/// that all hit the targets to well below the tolerance tie to the lower index. NotConverged if the best residual exceeds the tolerance.
DesignResult design(const DesignSpec& spec, std::uint64_t seed, int jobs = 1);

/// Memoized design() for the named presets used by experiments:
///   W11_design  pi,  7 harmonics, s = 1, {u, u2}   (started from the W11(pi) row)
///   S_design    pi,  5 harmonics, s = 1, {u}       (first-order surrogate)
///   F_design    pi,  5 harmonics, s = 0, {u2 = 1/3}   (started from the F1 row)
/// std::nullopt for other names.
std::optional<DesignSpec> designed_preset(std::string_view name);
std::vector<std::string> designed_preset_names();
const DesignResult& designed_shape(std::string_view name, std::uint64_t seed = 1);

}  // namespace softdd
