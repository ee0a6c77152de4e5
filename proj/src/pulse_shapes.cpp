#include "softdd/pulse_shapes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace softdd {

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Delta: return "delta";
    case ShapeKind::Gaussian: return "gaussian";
    case ShapeKind::Fourier: return "fourier";
  }
  return "?";
}

PulseShape PulseShape::delta(double phi0, double tau_p) {
  if (!(tau_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_p must be positive");
  PulseShape s;
  s.kind_ = ShapeKind::Delta;
  s.phi0_ = phi0;
  s.tau_p_ = tau_p;
  return s;
}

PulseShape PulseShape::gaussian(double width, double phi0, double tau_p) {
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian width must be positive");
  if (!(tau_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_p must be positive");
  PulseShape s;
  s.kind_ = ShapeKind::Gaussian;
  s.phi0_ = phi0;
  s.tau_p_ = tau_p;
  s.width_ = width;
  return s;
}

PulseShape PulseShape::fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                               double tau_p) {
  if (cos_coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "fourier shape needs A0");
  if (!(tau_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_p must be positive");
  PulseShape s;
  s.kind_ = ShapeKind::Fourier;
  s.tau_p_ = tau_p;
  s.phi0_ = 2.0 * kPi * cos_coeffs.front();
  s.cos_ = std::move(cos_coeffs);
  // Sine terms are indexed from n = 1; store a leading zero so indices line up.
  if (!sin_coeffs.empty()) {
    s.sin_.reserve(sin_coeffs.size() + 1);
    s.sin_.push_back(0.0);
    s.sin_.insert(s.sin_.end(), sin_coeffs.begin(), sin_coeffs.end());
  }
  return s;
}

PulseShape PulseShape::with_name(std::string name) const {
  PulseShape s = *this;
  s.name_ = std::move(name);
  return s;
}

PulseShape PulseShape::with_flags(bool corrupted_source, bool sign_corrected) const {
  PulseShape s = *this;
  s.corrupted_source_ = corrupted_source;
  s.sign_corrected_ = sign_corrected;
  return s;
}

PulseShape PulseShape::scaled(double factor) const {
  PulseShape s = *this;
  s.phi0_ *= factor;
  for (double& a : s.cos_) a *= factor;
  for (double& b : s.sin_) b *= factor;
  return s;
}

namespace {

// erf((t/tau_p - 1/2) / (sqrt(2) x)) at t = 0; the span to t = tau_p is twice its magnitude.
double shape_gauss_lo(const PulseShape& shape) {
  return -std::erf(0.5 / (std::sqrt(2.0) * shape.width()));
}

double shape_gauss_span(const PulseShape& shape) { return -2.0 * shape_gauss_lo(shape); }

double local_time(const PulseShape& shape, double t) {
  const double tp = shape.tau_p();
  const double slack = 1e-12 * tp;
  if (!(t >= -slack && t <= tp + slack)) {
    throw Error(ErrorCode::OutOfRange, "t = " + std::to_string(t) + " outside [0, tau_p]");
  }
  return std::clamp(t, 0.0, tp);
}

}  // namespace

double evaluate_waveform(const PulseShape& shape, double t) {
  t = local_time(shape, t);
  const double tp = shape.tau_p();
  switch (shape.kind()) {
    case ShapeKind::Delta:
      throw Error(ErrorCode::DeltaNotPointwise, "delta pulse has no pointwise waveform");
    case ShapeKind::Gaussian: {
      const double x = shape.width();
      const double y = t / tp - 0.5;
      // d/dt of erf(y / (sqrt(2) x)), normalized by the truncated mass.
      const double density = std::sqrt(2.0 / kPi) / (x * tp) * std::exp(-0.5 * y * y / (x * x));
      return shape.phi0() * density / shape_gauss_span(shape);
    }
    case ShapeKind::Fourier: {
      const double w = 2.0 * kPi * t / tp;
      const auto a = shape.cos_coeffs();
      const auto b = shape.sin_coeffs();
      double v = a[0];
      for (std::size_t n = 1; n < a.size(); ++n) v += a[n] * std::cos(w * n);
      for (std::size_t n = 1; n < b.size(); ++n) v += b[n] * std::sin(w * n);
      return 2.0 * kPi * v / tp;
    }
  }
  return 0.0;
}

double phase(const PulseShape& shape, double t) {
  t = local_time(shape, t);
  const double tp = shape.tau_p();
  switch (shape.kind()) {
    case ShapeKind::Delta:
      return t < 0.5 * tp ? 0.0 : shape.phi0();
    case ShapeKind::Gaussian: {
      const double e = std::erf((t / tp - 0.5) / (std::sqrt(2.0) * shape.width()));
      return shape.phi0() * (e - shape_gauss_lo(shape)) / shape_gauss_span(shape);
    }
    case ShapeKind::Fourier: {
      const double w = 2.0 * kPi * t / tp;
      const auto a = shape.cos_coeffs();
      const auto b = shape.sin_coeffs();
      double p = 2.0 * kPi * a[0] * t / tp;
      for (std::size_t n = 1; n < a.size(); ++n) p += a[n] / n * std::sin(w * n);
      for (std::size_t n = 1; n < b.size(); ++n) p += b[n] / n * (1.0 - std::cos(w * n));
      return p;
    }
  }
  return 0.0;
}

double symmetrized_angle(const PulseShape& shape, double t) {
  return phase(shape, t) - 0.5 * shape.phi0();
}

double peak_amplitude(const PulseShape& shape) {
  if (shape.kind() == ShapeKind::Delta) return std::numeric_limits<double>::infinity();
  constexpr int kSamples = 4096;
  double peak = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = shape.tau_p() * i / kSamples;
    peak = std::max(peak, std::abs(evaluate_waveform(shape, t)));
  }
  return peak;
}

double symmetry_defect(const PulseShape& shape) {
  if (shape.kind() == ShapeKind::Delta) return 0.0;
  constexpr int kSamples = 64;
  double defect = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = 0.5 * shape.tau_p() * i / kSamples;
    defect = std::max(defect, std::abs(evaluate_waveform(shape, t) -
                                       evaluate_waveform(shape, shape.tau_p() - t)));
  }
  return defect;
}

// ---------------------------------------------------------------- registry

std::string_view builtin_shape_table() {
  return R"(# name     phi0  kind      params
delta_pi     pi    delta
delta_pi2    pi/2  delta
G001_pi      pi    gaussian  0.01
G010_pi      pi    gaussian  0.10
G001_pi2     pi/2  gaussian  0.01
G010_pi2     pi/2  gaussian  0.10
F1           pi    fourier   0.5 -1.419474 -2.048028 1.549555 1.435813 -0.017867
# A5 of this row is unreadable in the source; stored as 0.
W11_pi       pi    fourier   0.5 -1.242022 -1.009075 0.700828 0.530624 0 0.277982 0.241663  @corrupted_source
W12_pi       pi    fourier   0.5 -1.291342 -0.753726 1.499438 0.364546 0.012680 -0.069983 -0.261614
W21_pi       pi    fourier   0.5 3.056086 -1.295369 -1.689687 -0.062202 -0.366646 -0.142183
W22_pi       pi    fourier   0.5 2.776007 -2.473314 -1.782314 0.958211 -0.444991 0.300165 0.166236
W31_pi       pi    fourier   0.5 -1.110710 -3.692547 1.248118 0.990698 1.394824 0.669618
W32_pi       pi    fourier   0.5 -1.686664 -2.108402 3.362253 1.029286 -0.260405 -0.836068
# A1 carries a restored minus sign; with it upsilon = upsilon2 = 0.
W11_pi2      pi/2  fourier   0.25 -2.011311 0.041292 1.381531 0.262448 0.076040  @sign_corrected
W12_pi2      pi/2  fourier   0.25 -2.023581 0.920572 1.341484 -0.113434 -0.144034 -0.231008  @sign_corrected
W21_pi2      pi/2  fourier   0.25 -2.018463 0.588295 1.393403 -0.206226 0.095943 -0.1029524  @sign_corrected
W22_pi2      pi/2  fourier   0.25 -2.018283 0.608538 1.386685 0.088935 0.024615 -0.134584 -0.205904  @sign_corrected
)";
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError,
                "shape table line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
}

}  // namespace

const ShapeRegistry& ShapeRegistry::builtin() {
  static const ShapeRegistry registry = parse(builtin_shape_table());
  return registry;
}

ShapeRegistry ShapeRegistry::parse(std::string_view table, ShapeRegistry base) {
  std::istringstream in{std::string(table)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const auto fail = [&](const std::string& msg) {
      return Error(ErrorCode::ConfigError,
                   "shape table line " + std::to_string(line_no) + ": " + msg);
    };
    if (tokens.size() < 3) throw fail("expected 'name phi0 kind params...'");

    bool corrupted = false;
    bool corrected = false;
    std::erase_if(tokens, [&](const std::string& tok) {
      if (tok.empty() || tok.front() != '@') return false;
      if (tok == "@corrupted_source") {
        corrupted = true;
      } else if (tok == "@sign_corrected") {
        corrected = true;
      } else {
        throw fail("unknown flag '" + tok + "'");
      }
      return true;
    });

    const std::string& name = tokens[0];
    double phi0 = 0.0;
    try {
      phi0 = parse_angle(tokens[1]);
    } catch (const Error&) {
      throw fail("bad angle '" + tokens[1] + "'");
    }
    const std::string& kind = tokens[2];

    PulseShape shape = PulseShape::delta(phi0);
    if (kind == "delta") {
      if (tokens.size() != 3) throw fail("delta rows take no parameters");
    } else if (kind == "gaussian") {
      if (tokens.size() != 4) throw fail("gaussian rows take exactly one width");
      shape = PulseShape::gaussian(parse_double(tokens[3], line_no), phi0);
    } else if (kind == "fourier") {
      std::vector<double> a;
      std::vector<double> b;
      bool sine = false;
      for (std::size_t i = 3; i < tokens.size(); ++i) {
        if (tokens[i] == "|") {
          if (sine) throw fail("more than one '|' separator");
          sine = true;
          continue;
        }
        (sine ? b : a).push_back(parse_double(tokens[i], line_no));
      }
      if (a.empty()) throw fail("fourier rows need at least A0");
      shape = PulseShape::fourier(std::move(a), std::move(b));
      if (std::abs(shape.phi0() - phi0) > 1e-9) {
        throw fail("phi0 does not equal 2 pi A0 for '" + name + "'");
      }
    } else {
      throw fail("unknown kind '" + kind + "'");
    }

    shape = shape.with_name(name).with_flags(corrupted, corrected);
    if (!base.shapes_.contains(name)) base.order_.push_back(name);
    base.shapes_.insert_or_assign(name, std::move(shape));
  }
  return base;
}

ShapeRegistry ShapeRegistry::load(const std::filesystem::path& path, ShapeRegistry base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open shape table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), std::move(base));
}

PulseShape ShapeRegistry::lookup(std::string_view name) const {
  if (const auto it = shapes_.find(name); it != shapes_.end()) return it->second;
  if (name.starts_with("delta:")) {
    double angle = 0.0;
    try {
      angle = parse_angle(name.substr(6));
    } catch (const Error&) {
      throw Error(ErrorCode::UnknownShape, "bad delta angle in '" + std::string(name) + "'");
    }
    return PulseShape::delta(angle).with_name(std::string(name));
  }
  throw Error(ErrorCode::UnknownShape, "no shape named '" + std::string(name) + "'");
}

bool ShapeRegistry::contains(std::string_view name) const {
  return shapes_.find(name) != shapes_.end();
}

std::vector<std::string> ShapeRegistry::names() const { return order_; }

std::string ShapeRegistry::dump() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& name : order_) {
    const PulseShape& s = shapes_.find(name)->second;
    out << name << ' ' << s.phi0() << ' ' << to_string(s.kind());
    if (s.kind() == ShapeKind::Gaussian) out << ' ' << s.width();
    if (s.kind() == ShapeKind::Fourier) {
      for (double a : s.cos_coeffs()) out << ' ' << a;
      if (!s.sin_coeffs().empty()) {
        out << " |";
        for (std::size_t n = 1; n < s.sin_coeffs().size(); ++n) out << ' ' << s.sin_coeffs()[n];
      }
    }
    if (s.corrupted_source()) out << " @corrupted_source";
    if (s.sign_corrected()) out << " @sign_corrected";
    out << '\n';
  }
  return out.str();
}

PulseShape catalogue_lookup(std::string_view name) { return ShapeRegistry::builtin().lookup(name); }

}  // namespace softdd
