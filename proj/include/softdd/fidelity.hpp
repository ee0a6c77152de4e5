#pragma once

#include "softdd/propagator.hpp"
#include "softdd/rate_model.hpp"

#include <vector>

namespace softdd {

/// F = (1 + Tr Q / 3) / 2, the fidelity averaged over initial states.
double fidelity_from_Q(const Mat3& q);

/// fidelity_from_Q at every checkpoint of the record.
std::vector<double> average_fidelity(const EvolutionRecord& record);

/// Best achievable fidelity: Markovian decay alone, no control, no field.
/// For NMR rates with gamma = 0 this is (2 + exp(-gamma_phi t)) / 3.
double ideal_fidelity(const RateModel& model, double t);

/// (3 + exp(-g1 t) + 2 exp(-g2 t)) / 6 with g1 = gamma_phi (1 + u2) / 2 and
/// g2 = gamma_phi (3 - u2) / 4.
double redistribution_fidelity(double t, double gamma_phi, double upsilon2);

struct EffectiveRates {
  double gamma1 = 0.0;  // longitudinal (zz) channel
  double gamma2 = 0.0;  // transverse (xx, yy) channels
};

/// Rates predicted by the redistribution law.
EffectiveRates redistribution_rates(double gamma_phi, double upsilon2);

/// Least-squares slopes of -log Q_zz and -log (Q_xx + Q_yy)/2 against t over
/// the trailing `fraction` of the checkpoints. Q should be an ensemble mean.
EffectiveRates fit_effective_rates(const std::vector<double>& times, const std::vector<Mat3>& q,
                                   double fraction = 0.5);

/// Per-checkpoint ensemble statistics.
struct FidelitySeries {
  std::vector<double> times;
  std::vector<double> F_avg;
  std::vector<double> stderr_;
};

/// Mean and standard error over realizations (rows), reduced in index order
/// with compensated summation.
FidelitySeries ensemble_mean(const std::vector<double>& times,
                             const std::vector<std::vector<double>>& realizations);

/// Delta F = F(without noise) - F(with noise). CheckpointMismatch unless both
/// series share the same checkpoint times.
std::vector<double> decoupling_error(const FidelitySeries& with_noise,
                                     const FidelitySeries& without_noise);

}  // namespace softdd
