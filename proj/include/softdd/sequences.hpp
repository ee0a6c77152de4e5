#pragma once

#include "softdd/pulse_shapes.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace softdd {

/// One slot of a sequence. `sign` = -1 is the barred pulse (negated
/// waveform); `scale` multiplies the waveform so that a slot can override the
/// shape's nominal angle; a free slot carries no control.
struct PulseInstance {
  Vec3 axis = Vec3::UnitX();
  int sign = 1;
  double scale = 1.0;
  bool free = false;

  double angle(const PulseShape& shape) const { return free ? 0.0 : sign * scale * shape.phi0(); }
};

/// Rotation accumulated inside one slot after local time t_local:
/// exp(-theta [n x]) with theta = sign * scale * phi(t_local).
Mat3 pulse_rotation(const PulseInstance& pulse, const PulseShape& shape, double t_local);

/// Ordered pulse list sharing one shape. Pulses are kept in written order and
/// strings are read as operator products, so the rightmost pulse acts first:
/// time slot k holds pulses[n - 1 - k]. Period tau = n tau_p.
class Sequence {
 public:
  Sequence(std::string name, PulseShape shape, std::vector<PulseInstance> pulses);

  const std::string& name() const { return name_; }
  const PulseShape& shape() const { return shape_; }
  const std::vector<PulseInstance>& pulses() const { return pulses_; }
  int size() const { return static_cast<int>(pulses_.size()); }
  double tau_p() const { return shape_.tau_p(); }
  double period() const { return size() * tau_p(); }

  /// Pulse acting during [k tau_p, (k+1) tau_p].
  const PulseInstance& slot(int k) const { return pulses_[pulses_.size() - 1 - k]; }

  /// Product of the full rotations of slots 0..k-1 (newest on the left).
  const Mat3& completed_rotation(int k) const { return prefix_[k]; }

  /// Canonical DSL text of the pulse list.
  std::string dsl() const;

 private:
  std::string name_;
  PulseShape shape_;
  std::vector<PulseInstance> pulses_;
  std::vector<Mat3> prefix_;
};

/// Parses tokens X, Y, -X, -Y, 0 with optional ^{angle}, e.g. "X Y -X Y" or
/// "X^{pi/2} -Y". An angle override becomes scale = angle / phi0.
std::vector<PulseInstance> parse_dsl(std::string_view dsl, double phi0);

std::vector<std::string> catalogue_sequence_names();

/// Written-order DSL for a catalogue name. UnknownSequence otherwise.
std::string canonical_dsl(std::string_view name);

/// Catalogue sequence with angle validation: pi sequences (2s, 2a, 4a, 4p, 8s,
/// 8a, 16a) need phi0 = pi, pi/2 sequences (5, 12, 24, 48) need phi0 = pi/2.
/// "X", "Y" and "none" accept any angle.
Sequence catalogue_sequence(std::string_view name, const PulseShape& shape);

/// Catalogue name, or a DSL string if it is not a catalogue name.
Sequence make_sequence(std::string_view name_or_dsl, const PulseShape& shape);

/// Control rotation Q0(t) for t in [0, tau].
Mat3 control_rotation(const Sequence& seq, double t);

}  // namespace softdd
