#include "softdd/fidelity.hpp"

#include "softdd/parallel.hpp"

#include <cmath>

namespace softdd {

double fidelity_from_Q(const Mat3& q) { return 0.5 * (1.0 + q.trace() / 3.0); }

std::vector<double> average_fidelity(const EvolutionRecord& record) {
  std::vector<double> f;
  f.reserve(record.Q.size());
  for (const auto& q : record.Q) f.push_back(fidelity_from_Q(q));
  return f;
}

double ideal_fidelity(const RateModel& model, double t) {
  const Mat3 gen = build_generator(model.with_field(Vec3::Zero()));
  return 0.5 + expm(-t * gen).trace() / 6.0;
}

double redistribution_fidelity(double t, double gamma_phi, double upsilon2) {
  const EffectiveRates r = redistribution_rates(gamma_phi, upsilon2);
  return (3.0 + std::exp(-r.gamma1 * t) + 2.0 * std::exp(-r.gamma2 * t)) / 6.0;
}

EffectiveRates redistribution_rates(double gamma_phi, double upsilon2) {
  return {gamma_phi * (1.0 + upsilon2) / 2.0, gamma_phi * (3.0 - upsilon2) / 4.0};
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

EffectiveRates fit_effective_rates(const std::vector<double>& times, const std::vector<Mat3>& q,
                                   double fraction) {
  if (times.size() != q.size()) throw Error(ErrorCode::CheckpointMismatch, "times/Q size mismatch");
  const std::size_t n = times.size();
  const auto start = static_cast<std::size_t>(std::floor((1.0 - fraction) * (n - 1)));
  std::vector<double> t, lz, lt;
  for (std::size_t i = start; i < n; ++i) {
    const double zz = q[i](2, 2);
    const double tr = 0.5 * (q[i](0, 0) + q[i](1, 1));
    if (!(zz > 0.0) || !(tr > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "non-positive diagonal in rate fit");
    }
    t.push_back(times[i]);
    lz.push_back(-std::log(zz));
    lt.push_back(-std::log(tr));
  }
  if (t.size() < 2) throw Error(ErrorCode::InvalidArgument, "rate fit needs two checkpoints");
  return {slope(t, lz), slope(t, lt)};
}

FidelitySeries ensemble_mean(const std::vector<double>& times,
                             const std::vector<std::vector<double>>& realizations) {
  FidelitySeries out;
  out.times = times;
  const std::size_t n = realizations.size();
  out.F_avg.assign(times.size(), 0.0);
  out.stderr_.assign(times.size(), 0.0);
  if (n == 0) return out;
  for (const auto& r : realizations) {
    if (r.size() != times.size()) throw Error(ErrorCode::CheckpointMismatch, "realization length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    NeumaierSum sum;
    for (const auto& r : realizations) sum.add(r[i]);
    const double mean = sum.value() / n;
    NeumaierSum sq;
    for (const auto& r : realizations) sq.add((r[i] - mean) * (r[i] - mean));
    out.F_avg[i] = mean;
    out.stderr_[i] = n > 1 ? std::sqrt(sq.value() / (n - 1) / n) : 0.0;
  }
  return out;
}

std::vector<double> decoupling_error(const FidelitySeries& with_noise,
                                     const FidelitySeries& without_noise) {
  if (with_noise.times.size() != without_noise.times.size()) {
    throw Error(ErrorCode::CheckpointMismatch, "series have different lengths");
  }
  std::vector<double> d(with_noise.times.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double t = with_noise.times[i];
    if (std::abs(t - without_noise.times[i]) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::CheckpointMismatch, "checkpoint times differ at index " + std::to_string(i));
    }
    d[i] = without_noise.F_avg[i] - with_noise.F_avg[i];
  }
  return d;
}

}  // namespace softdd
