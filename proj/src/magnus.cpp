#include "softdd/magnus.hpp"

#include "softdd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace softdd {

Mat3 interaction_generator(const Sequence& seq, const RateModel& model, double t) {
  const Mat3 q = control_rotation(seq, t);
  return q.transpose() * build_generator(model) * q;
}

namespace {

constexpr int kOrder = 8;

struct Moments {
  Mat3 g0;
  Mat3 g1;
};

Moments integrate(const Sequence& seq, const Mat3& gen, int panels_per_pulse) {
  const GaussRule& rule = gauss_legendre(kOrder);
  const PulseShape& shape = seq.shape();
  const double tp = seq.tau_p();
  const double h = tp / panels_per_pulse;

  auto frame = [&](int k, double local) {
    const Mat3 q = pulse_rotation(seq.slot(k), shape, local) * seq.completed_rotation(k);
    return Mat3(q.transpose() * gen * q);
  };

  Mat3 g0 = Mat3::Zero();
  Mat3 g1 = Mat3::Zero();
  Mat3 running = Mat3::Zero();  // int_0^{panel edge} Gamma
  for (int k = 0; k < seq.size(); ++k) {
    const bool constant = seq.slot(k).free;
    for (int p = 0; p < panels_per_pulse; ++p) {
      const double a = p * h;
      Mat3 panel = Mat3::Zero();
      for (int j = 0; j < kOrder; ++j) {
        const double local = a + 0.5 * h * (1.0 + rule.nodes[j]);
        const double w = 0.5 * h * rule.weights[j];
        const Mat3 g = frame(k, local);
        Mat3 c = running;
        const double half = 0.5 * (local - a);
        if (constant) {
          c += (local - a) * g;
        } else {
          for (int m = 0; m < kOrder; ++m) {
            c += half * rule.weights[m] * frame(k, a + half * (1.0 + rule.nodes[m]));
          }
        }
        panel += w * g;
        g1 += w * (g * c - c * g);
      }
      g0 += panel;
      running += panel;
    }
  }
  const double tau = seq.period();
  return {g0 / tau, g1 * (-0.5 / tau)};
}

}  // namespace

CumulantResult cumulants(const Sequence& seq, const RateModel& model, const CumulantOptions& opts) {
  const Mat3 gen = build_generator(model);
  int panels = std::max(2, opts.panels_per_pulse);
  if (seq.shape().kind() == ShapeKind::Gaussian) {
    panels = std::max(panels, static_cast<int>(std::ceil(4.0 / seq.shape().width())));
  }
  panels += panels % 2;

  const Moments coarse = integrate(seq, gen, panels);
  const Moments fine = integrate(seq, gen, 2 * panels);

  CumulantResult out;
  out.tau = seq.period();
  out.gamma0 = fine.g0;
  out.gamma1 = fine.g1;
  out.residual_norm = std::max((fine.g0 - coarse.g0).cwiseAbs().maxCoeff(),
                               (fine.g1 - coarse.g1).cwiseAbs().maxCoeff());
  out.period_rotation = seq.completed_rotation(seq.size());
  out.periodic = (out.period_rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-8;

  const double g = gen.cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, g, g * g * out.tau});
  if (out.residual_norm > opts.tolerance * scale) {
    throw Error(ErrorCode::QuadratureNotConverged,
                "cumulant quadrature residual " + std::to_string(out.residual_norm));
  }
  return out;
}

AnalyticCase parse_analytic_case(std::string_view name) {
  for (auto c : {AnalyticCase::HardPiX, AnalyticCase::SoftPiX, AnalyticCase::Soft4p,
                 AnalyticCase::Hard4p, AnalyticCase::Seq12Nmr, AnalyticCase::Seq24Nmr,
                 AnalyticCase::Seq48Nmr}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::UnsupportedCase, "no analytic case '" + std::string(name) + "'");
}

std::string_view to_string(AnalyticCase c) {
  switch (c) {
    case AnalyticCase::HardPiX: return "hard_pi_x";
    case AnalyticCase::SoftPiX: return "soft_pi_x";
    case AnalyticCase::Soft4p: return "soft_4p";
    case AnalyticCase::Hard4p: return "hard_4p";
    case AnalyticCase::Seq12Nmr: return "seq12_nmr";
    case AnalyticCase::Seq24Nmr: return "seq24_nmr";
    case AnalyticCase::Seq48Nmr: return "seq48_nmr";
  }
  return "?";
}

namespace {

Mat3 soft_pi_x(const RateModel& m, double u, double u2) {
  const Mat3& g = m.gamma_hat;
  const double gx = g(0, 0), gy = g(1, 1), gz = g(2, 2);
  const double gxy = g(0, 1), gxz = g(0, 2), gyz = g(1, 2);
  const double bx = m.B.x(), by = m.B.y(), bz = m.B.z();
  Mat3 r;
  r << gy + gz, u * (by + gxz), u * (bz - gxy),
       u * (gxz - by), gx + gy * (1 + u2) / 2 + gz * (1 - u2) / 2, u2 * gyz + bx,
       -u * (bz + gxy), u2 * gyz - bx, gx + gy * (1 - u2) / 2 + gz * (1 + u2) / 2;
  return r;
}

Mat3 soft_4p(const RateModel& m, double u, double u2) {
  const Mat3& g = m.gamma_hat;
  const double gx = g(0, 0), gy = g(1, 1), gz = g(2, 2);
  const double gxy = g(0, 1), gyz = g(1, 2);
  const double bx = m.B.x(), bz = m.B.z();
  const double lo = (3 - u2) / 4, hi = (1 + u2) / 4;
  Mat3 r;
  r << gy + gz * lo + gx * hi, -u / 2 * (bx + gyz), u / 2 * (gxy - bz),
       u / 2 * (bx - gyz), gx + gz * lo + gy * hi, 0.0,
       u / 2 * (bz + gxy), 0.0, (gx + gy) * lo + gz * (1 + u2) / 2;
  return r;
}

}  // namespace

Mat3 analytic_gamma0(AnalyticCase which, const RateModel& model, const ShapeCoefficients& coeffs) {
  model.validate();
  const auto need_nmr = [&] {
    if (!model.is_nmr()) {
      throw Error(ErrorCode::NotNmrForm,
                  std::string(to_string(which)) + " is defined for NMR-form rates only");
    }
  };
  switch (which) {
    case AnalyticCase::HardPiX: return soft_pi_x(model, 0.0, -1.0);
    case AnalyticCase::SoftPiX: return soft_pi_x(model, coeffs.upsilon, coeffs.upsilon2);
    case AnalyticCase::Soft4p: return soft_4p(model, coeffs.upsilon, coeffs.upsilon2);
    case AnalyticCase::Hard4p: {
      const Mat3& g = model.gamma_hat;
      return Vec3(g(1, 1) + g(2, 2), g(0, 0) + g(2, 2), g(0, 0) + g(1, 1)).asDiagonal();
    }
    case AnalyticCase::Seq12Nmr: {
      need_nmr();
      const double d = 4.0 * (2.0 * model.gamma() + model.gamma_phi());
      const double by = model.B.y(), bz = model.B.z();
      Mat3 r;
      r << d, 2 * by, -bz,
           -2 * by, d, bz,
           bz, -bz, d;
      return r / 6.0;
    }
    case AnalyticCase::Seq24Nmr:
    case AnalyticCase::Seq48Nmr:
      need_nmr();
      return symmetrized_target(model);
  }
  throw Error(ErrorCode::UnsupportedCase, "unhandled analytic case");
}

Mat3 effective_evolution(const CumulantResult& cum, double n_periods) {
  if (n_periods < 0) throw Error(ErrorCode::InvalidArgument, "n_periods must be non-negative");
  return expm(-n_periods * cum.tau * (cum.gamma0 + cum.gamma1));
}

}  // namespace softdd
