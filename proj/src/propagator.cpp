#include "softdd/propagator.hpp"

#include "softdd/magnus.hpp"

#include <cmath>

namespace softdd {

namespace {

int steps_for(double tau_p, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double ratio = tau_p / dt;
  const auto steps = static_cast<int>(std::lround(ratio));
  if (steps < 2 || std::abs(ratio - steps) > 1e-9 * ratio || steps % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "dt must split tau_p into an even number of steps (got tau_p/dt = " +
                    std::to_string(ratio) + ")");
  }
  return steps;
}

double max_scale(const Sequence& seq) {
  double s = 0.0;
  for (const auto& p : seq.pulses()) {
    if (!p.free) s = std::max(s, std::abs(p.scale));
  }
  return s;
}

}  // namespace

EvolutionRecord propagate(const Sequence& seq, const RateModel& model, const NoiseRealization* noise,
                          int n_periods, double dt) {
  model.validate();
  if (n_periods < 0) throw Error(ErrorCode::InvalidArgument, "n_periods must be >= 0");
  const PulseShape& shape = seq.shape();
  const double tp = seq.tau_p();
  const int steps = steps_for(tp, dt);
  const bool hard = shape.kind() == ShapeKind::Delta;

  if (!hard) {
    const double peak = peak_amplitude(shape) * max_scale(seq);
    if (peak * dt > kStepGuard) {
      throw Error(ErrorCode::StepTooLarge, "peak |V| dt = " + std::to_string(peak * dt) +
                                               " rad exceeds " + std::to_string(kStepGuard));
    }
  }

  const double total = n_periods * seq.period();
  if (noise && noise->size() > 0 && noise->duration() < total - 1e-9 * total) {
    throw Error(ErrorCode::InvalidArgument, "noise realization shorter than the propagation time");
  }

  const Mat3 lindblad = model.gamma_hat - Mat3::Identity() * model.gamma_hat.trace();
  const Mat3 base = lindblad + cross_matrix(model.B);

  // Inside slot k, Q(t) = U_k(t_local) W(t) with U_k the exact control
  // rotation of that slot, so W obeys dW/dt = U^T (L + [b x]) U W and RK4
  // only has to resolve the slow part. U and U^T base U are tabulated at
  // half steps.
  struct SlotFrame {
    std::vector<Mat3> u;
    std::vector<Mat3> a;
  };
  std::vector<SlotFrame> frames(seq.size());
  std::vector<Mat3> jumps(seq.size());
  for (int k = 0; k < seq.size(); ++k) {
    const PulseInstance& p = seq.slot(k);
    jumps[k] = pulse_rotation(p, shape, tp);
    if (hard || p.free) continue;
    SlotFrame& f = frames[k];
    f.u.resize(2 * steps + 1);
    f.a.resize(2 * steps + 1);
    for (int j = 0; j <= 2 * steps; ++j) {
      f.u[j] = pulse_rotation(p, shape, 0.5 * j * dt);
      f.a[j] = f.u[j].transpose() * base * f.u[j];
    }
  }

  EvolutionRecord rec;
  rec.sequence = seq.name();
  rec.shape = shape.name();
  rec.dt = dt;
  rec.steps_per_pulse = steps;
  if (noise) rec.noise_seed = noise->seed;
  rec.times.reserve(n_periods + 1);
  rec.Q.reserve(n_periods + 1);
  rec.times.push_back(0.0);
  rec.Q.push_back(Mat3::Identity());

  const bool noisy = noise && noise->size() > 0;
  auto generator = [&](const SlotFrame& f, int half_index, double t) {
    if (f.u.empty()) {
      return noisy ? Mat3(base + cross_matrix(noise->at(t))) : base;
    }
    if (!noisy) return f.a[half_index];
    return Mat3(f.a[half_index] + cross_matrix(f.u[half_index].transpose() * noise->at(t)));
  };

  Mat3 q = Mat3::Identity();
  for (int s = 0; s < n_periods; ++s) {
    for (int k = 0; k < seq.size(); ++k) {
      const SlotFrame& f = frames[k];
      const double slot_start = (static_cast<double>(s) * seq.size() + k) * tp;
      for (int i = 0; i < steps; ++i) {
        if (hard && i == steps / 2 && !seq.slot(k).free) q = jumps[k] * q;
        const double t = slot_start + i * dt;
        const Mat3 a0 = generator(f, 2 * i, t);
        const Mat3 a1 = generator(f, 2 * i + 1, t + 0.5 * dt);
        const Mat3 a2 = generator(f, 2 * i + 2, t + dt);
        const Mat3 k1 = a0 * q;
        const Mat3 k2 = a1 * (q + 0.5 * dt * k1);
        const Mat3 k3 = a1 * (q + 0.5 * dt * k2);
        const Mat3 k4 = a2 * (q + dt * k3);
        q += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (!f.u.empty()) q = f.u.back() * q;
    }
    rec.times.push_back((s + 1) * seq.period());
    rec.Q.push_back(q);
  }
  return rec;
}

double auto_step(const Sequence& seq, double dt_max) {
  const double tp = seq.tau_p();
  double dt = dt_max;
  steps_for(tp, dt);
  if (seq.shape().kind() == ShapeKind::Delta) return dt;
  const double peak = peak_amplitude(seq.shape()) * max_scale(seq);
  for (int i = 0; i < 30 && peak * dt > kStepGuard; ++i) dt *= 0.5;
  return dt;
}

double product_expansion_check(const Sequence& seq, const RateModel& model, double dt) {
  const double tp = seq.tau_p();
  Mat3 product = Mat3::Identity();
  for (int k = 0; k < seq.size(); ++k) {
    const PulseInstance& p = seq.slot(k);
    const Sequence single("slot", seq.shape(), {p});
    const CumulantResult c = cumulants(single, model);
    const Mat3 s = Mat3::Identity() - tp * c.gamma0 - tp * c.gamma1 +
                   0.5 * tp * tp * c.gamma0 * c.gamma0;
    product = pulse_rotation(p, seq.shape(), tp) * s * product;
  }
  const EvolutionRecord rec = propagate(seq, model, nullptr, 1, dt);
  return (product - rec.Q.back()).cwiseAbs().maxCoeff();
}

}  // namespace softdd
