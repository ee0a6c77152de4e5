#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace softdd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorCode {
  InvalidArgument,
  DeltaNotPointwise,
  OutOfRange,
  UnknownShape,
  QuadratureNotConverged,
  AsymmetricPulse,
  IndefiniteRates,
  NotNmrForm,
  AngleMismatch,
  UnknownSequence,
  UnsupportedCase,
  GridTooCoarse,
  StepTooLarge,
  CheckpointMismatch,
  NotConverged,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this exception; `code()` names
/// the failure class so callers (and tests) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Matrix of the map R -> v x R.
inline Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Active rotation exp(angle [n x]) for a unit axis n (Rodrigues).
inline Mat3 active_rotation(const Vec3& axis, double angle) {
  const Mat3 k = cross_matrix(axis);
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * (k * k);
}

/// Parses angles such as "pi", "pi/2", "-3*pi/4", "2pi", "1/3" or "1.5707".
double parse_angle(std::string_view text);

/// Matrix exponential by scaling and squaring around a [6/6] Pade core.
Mat3 expm(const Mat3& a);

}  // namespace softdd
