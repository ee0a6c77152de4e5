#include "softdd/shape_coeffs.hpp"

#include "softdd/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace softdd {

namespace {

constexpr int kOrder = 8;

double max_difference(const ShapeCoefficients& a, const ShapeCoefficients& b) {
  const std::array<double, 7> d{a.upsilon - b.upsilon, a.upsilon2 - b.upsilon2, a.alpha - b.alpha,
                                a.alpha2 - b.alpha2,   a.zeta - b.zeta,         a.zeta2 - b.zeta2,
                                a.mu - b.mu};
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  return m;
}

int initial_panels(const PulseShape& shape, const QuadratureOptions& opts) {
  int panels = std::max(2, opts.panels);
  // At least 32 nodes per Gaussian width.
  if (shape.kind() == ShapeKind::Gaussian) {
    panels = std::max(panels, static_cast<int>(std::ceil(4.0 / shape.width())));
  }
  return panels + panels % 2;
}

template <class Eval, class Diff>
auto refine(int panels, const QuadratureOptions& opts, Eval eval, Diff diff) {
  auto coarse = eval(panels);
  for (int r = 0; r < opts.max_refinements; ++r) {
    panels *= 2;
    auto fine = eval(panels);
    if (diff(coarse, fine) <= opts.tolerance) return fine;
    coarse = fine;
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              "no agreement to " + std::to_string(opts.tolerance) + " after " +
                  std::to_string(opts.max_refinements) + " refinements");
}

double scalar_diff(double a, double b) { return std::abs(a - b); }

void check_symmetric(const PulseShape& shape) {
  if (shape.kind() == ShapeKind::Delta) return;
  const double scale = std::max(1.0, peak_amplitude(shape));
  if (symmetry_defect(shape) > 1e-9 * scale) {
    throw Error(ErrorCode::AsymmetricPulse,
                "shape '" + shape.name() + "' is not symmetric about its midpoint");
  }
}

}  // namespace

double pulse_average(const std::function<double(double)>& f, double tau_p,
                     const QuadratureOptions& opts) {
  auto eval = [&](int panels) {
    const PanelGrid g = composite_gauss(0.0, tau_p, panels, kOrder);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(g.nodes[i]);
    return s / tau_p;
  };
  const int panels = std::max(2, opts.panels);
  return refine(panels + panels % 2, opts, eval, scalar_diff);
}

double double_average(const std::function<double(double, double)>& f, double tau_p,
                      const QuadratureOptions& opts) {
  const GaussRule& rule = gauss_legendre(kOrder);
  auto eval = [&](int panels) {
    const PanelGrid g = composite_gauss(0.0, tau_p, panels, kOrder);
    const double h = g.panel_width();
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      for (int k = 0; k < kOrder; ++k) {
        const std::size_t i = static_cast<std::size_t>(p) * kOrder + k;
        const double t = g.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < static_cast<std::size_t>(p) * kOrder; ++j) {
          inner += g.weights[j] * f(t, g.nodes[j]);
        }
        const double a = p * h;
        const double half = 0.5 * (t - a);
        for (int m = 0; m < kOrder; ++m) {
          inner += half * rule.weights[m] * f(t, a + half * (1.0 + rule.nodes[m]));
        }
        total += g.weights[i] * inner;
      }
    }
    return total / (tau_p * tau_p);
  };
  const int panels = std::max(2, opts.panels);
  return refine(panels + panels % 2, opts, eval, scalar_diff);
}

ShapeCoefficients delta_coefficients(double phi0) {
  ShapeCoefficients c;
  c.upsilon = std::cos(0.5 * phi0);
  c.upsilon2 = std::cos(phi0);
  c.alpha = 0.25 * std::sin(phi0);
  c.alpha2 = 0.25 * std::sin(2.0 * phi0);
  c.zeta = 0.25 * std::sin(0.5 * phi0);
  c.zeta2 = 0.25 * std::sin(phi0);
  c.mu = 0.25 * std::sin(1.5 * phi0);
  return c;
}

ShapeCoefficients coefficients_on_grid(const PulseShape& shape, int panels) {
  if (shape.kind() == ShapeKind::Delta) return delta_coefficients(shape.phi0());
  const double tp = shape.tau_p();
  const GaussRule& rule = gauss_legendre(kOrder);
  const PanelGrid g = composite_gauss(0.0, tp, panels, kOrder);
  const double h = g.panel_width();

  struct Trig {
    double c1, s1, c2, s2;
  };
  auto trig = [&](double t) {
    const double p = symmetrized_angle(shape, t);
    return Trig{std::cos(p), std::sin(p), std::cos(2.0 * p), std::sin(2.0 * p)};
  };

  ShapeCoefficients out;
  // Running integrals of cos p, sin p, cos 2p, sin 2p up to the current panel edge.
  double ec1 = 0.0, es1 = 0.0, ec2 = 0.0, es2 = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    double pc1 = 0.0, ps1 = 0.0, pc2 = 0.0, ps2 = 0.0;
    for (int k = 0; k < kOrder; ++k) {
      const std::size_t i = static_cast<std::size_t>(p) * kOrder + k;
      const double t = g.nodes[i];
      const double w = g.weights[i];
      const Trig v = trig(t);

      double c1 = ec1, s1 = es1, c2 = ec2, s2 = es2;
      const double half = 0.5 * (t - a);
      for (int m = 0; m < kOrder; ++m) {
        const Trig u = trig(a + half * (1.0 + rule.nodes[m]));
        const double wm = half * rule.weights[m];
        c1 += wm * u.c1;
        s1 += wm * u.s1;
        c2 += wm * u.c2;
        s2 += wm * u.s2;
      }

      const double x = t / tp - 0.5;
      out.upsilon += w * v.c1;
      out.upsilon2 += w * v.c2;
      out.zeta += w * x * v.s1;
      out.zeta2 += w * x * v.s2;
      out.alpha += w * (v.s1 * c1 - v.c1 * s1);
      out.alpha2 += w * (v.s2 * c2 - v.c2 * s2);
      out.mu += w * (v.s2 * c1 - v.c2 * s1);

      pc1 += w * v.c1;
      ps1 += w * v.s1;
      pc2 += w * v.c2;
      ps2 += w * v.s2;
    }
    ec1 += pc1;
    es1 += ps1;
    ec2 += pc2;
    es2 += ps2;
  }
  out.upsilon /= tp;
  out.upsilon2 /= tp;
  out.zeta /= tp;
  out.zeta2 /= tp;
  const double tp2 = tp * tp;
  out.alpha /= tp2;
  out.alpha2 /= tp2;
  out.mu /= tp2;
  return out;
}

ShapeCoefficients compute_coefficients(const PulseShape& shape, const QuadratureOptions& opts) {
  if (shape.kind() == ShapeKind::Delta) return delta_coefficients(shape.phi0());
  check_symmetric(shape);
  auto eval = [&](int panels) { return coefficients_on_grid(shape, panels); };
  return refine(initial_panels(shape, opts), opts, eval, max_difference);
}

ShapeCoefficients compute_coefficients_nested(const PulseShape& shape,
                                              const QuadratureOptions& opts) {
  const double tp = shape.tau_p();
  QuadratureOptions o = opts;
  o.panels = initial_panels(shape, opts);
  auto p = [&](double t) { return symmetrized_angle(shape, t); };
  ShapeCoefficients c;
  c.upsilon = pulse_average([&](double t) { return std::cos(p(t)); }, tp, o);
  c.upsilon2 = pulse_average([&](double t) { return std::cos(2.0 * p(t)); }, tp, o);
  c.zeta = pulse_average([&](double t) { return (t / tp - 0.5) * std::sin(p(t)); }, tp, o);
  c.zeta2 = pulse_average([&](double t) { return (t / tp - 0.5) * std::sin(2.0 * p(t)); }, tp, o);
  c.alpha = double_average([&](double t, double s) { return std::sin(p(t) - p(s)); }, tp, o);
  c.alpha2 =
      double_average([&](double t, double s) { return std::sin(2.0 * p(t) - 2.0 * p(s)); }, tp, o);
  c.mu = double_average([&](double t, double s) { return std::sin(2.0 * p(t) - p(s)); }, tp, o);
  return c;
}

}  // namespace softdd
