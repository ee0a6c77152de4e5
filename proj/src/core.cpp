#include "softdd/core.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace softdd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DeltaNotPointwise: return "DeltaNotPointwise";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnknownShape: return "UnknownShape";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::AsymmetricPulse: return "AsymmetricPulse";
    case ErrorCode::IndefiniteRates: return "IndefiniteRates";
    case ErrorCode::NotNmrForm: return "NotNmrForm";
    case ErrorCode::AngleMismatch: return "AngleMismatch";
    case ErrorCode::UnknownSequence: return "UnknownSequence";
    case ErrorCode::UnsupportedCase: return "UnsupportedCase";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view whole) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

double parse_angle(std::string_view text) {
  const std::string_view s = trim(text);
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_number(s, text);
    return parse_number(s.substr(0, slash), text) / parse_number(s.substr(slash + 1), text);
  }

  std::string_view prefix = trim(s.substr(0, pi_pos));
  std::string_view suffix = trim(s.substr(pi_pos + 2));
  if (!prefix.empty() && prefix.back() == '*') prefix = trim(prefix.substr(0, prefix.size() - 1));

  double factor = 1.0;
  if (prefix == "-") {
    factor = -1.0;
  } else if (!prefix.empty() && prefix != "+") {
    factor = parse_number(prefix, text);
  }
  double divisor = 1.0;
  if (!suffix.empty()) {
    if (suffix.front() != '/') {
      throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + std::string(text) + "'");
    }
    divisor = parse_number(suffix.substr(1), text);
  }
  return factor * kPi / divisor;
}

Mat3 expm(const Mat3& a) {
  static constexpr double c[] = {1.0,         1.0 / 2.0,    5.0 / 44.0,     1.0 / 66.0,
                                 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat3 x = a / std::ldexp(1.0, squarings);

  Mat3 power = Mat3::Identity();
  Mat3 num = Mat3::Identity();
  Mat3 den = Mat3::Identity();
  for (int k = 1; k <= 6; ++k) {
    power = power * x;
    num += c[k] * power;
    den += ((k % 2 == 0) ? c[k] : -c[k]) * power;
  }
  Mat3 result = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace softdd
