#include "softdd/rate_model.hpp"

#include <Eigen/Eigenvalues>

namespace softdd {

RateModel RateModel::nmr(double gamma, double gamma_phi, const Vec3& B) {
  RateModel m;
  m.gamma_hat = Vec3(gamma, gamma, gamma_phi).asDiagonal();
  m.B = B;
  m.validate();
  return m;
}

void RateModel::validate() const {
  if (!gamma_hat.allFinite() || !B.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "rate model contains non-finite values");
  }
  const double scale = std::max(1.0, gamma_hat.cwiseAbs().maxCoeff());
  if ((gamma_hat - gamma_hat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::IndefiniteRates, "gamma_hat is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(gamma_hat, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw Error(ErrorCode::IndefiniteRates,
                "gamma_hat has a negative eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
  }
}

bool RateModel::is_nmr(double tol) const {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j && std::abs(gamma_hat(i, j)) > tol) return false;
    }
  }
  return std::abs(gamma_hat(0, 0) - gamma_hat(1, 1)) <= tol;
}

RateModel RateModel::scaled(double factor) const {
  RateModel m = *this;
  m.gamma_hat *= factor;
  m.R_vec *= factor;
  m.B *= factor;
  return m;
}

RateModel RateModel::with_field(const Vec3& field) const {
  RateModel m = *this;
  m.B = field;
  return m;
}

Mat3 build_generator(const RateModel& model) {
  model.validate();
  return Mat3::Identity() * model.gamma_hat.trace() - model.gamma_hat - cross_matrix(model.B);
}

Mat3 symmetrized_target(const RateModel& model) {
  if (!model.is_nmr()) throw Error(ErrorCode::NotNmrForm, "symmetrized target needs an NMR model");
  return Mat3::Identity() * (2.0 / 3.0) * (2.0 * model.gamma() + model.gamma_phi());
}

double effective_T1_4p(const RateModel& model, double upsilon2) {
  if (!model.is_nmr()) throw Error(ErrorCode::NotNmrForm, "effective T1 needs an NMR model");
  const double g = model.gamma();
  return 2.0 * g - (g - model.gamma_phi()) * (1.0 + upsilon2) / 2.0;
}

}  // namespace softdd
