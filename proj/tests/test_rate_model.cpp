#include "softdd/rate_model.hpp"

#include <doctest.h>

#include <random>

using namespace softdd;

namespace {

RateModel random_model(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
  }
  RateModel r;
  r.gamma_hat = 0.01 * m * m.transpose();
  r.B = Vec3(n(rng), n(rng), n(rng));
  return r;
}

}  // namespace

TEST_CASE("NMR generator layout") {
  const double g = 0.013, gp = 0.041;
  const Vec3 b(0.3, -0.2, 0.5);
  const Mat3 G = build_generator(RateModel::nmr(g, gp, b));
  Mat3 expect;
  expect << g + gp, b.z(), -b.y(),
            -b.z(), g + gp, b.x(),
            b.y(), -b.x(), 2 * g;
  CHECK((G - expect).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("generator examples") {
  CHECK((build_generator(RateModel::nmr(0.2, 0.2)) - 0.4 * Mat3::Identity()).norm() < 1e-15);
  const double gp = 2 * kPi * 1e-3;
  const Mat3 G = build_generator(RateModel::nmr(0.0, gp));
  CHECK((G - Vec3(gp, gp, 0.0).asDiagonal().toDenseMatrix()).norm() < 1e-16);
}

TEST_CASE("generator drives dR/dt = B x R") {
  RateModel m;
  m.B = Vec3(0.0, 0.0, 1.0);
  const Vec3 r(1.0, 0.0, 0.0);
  CHECK((-build_generator(m) * r - m.B.cross(r)).norm() < 1e-16);
}

TEST_CASE("trace identity and linearity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const RateModel a = random_model(rng), b = random_model(rng);
    CHECK(build_generator(a).trace() == doctest::Approx(2 * a.gamma_hat.trace()).epsilon(1e-14));
    RateModel sum;
    sum.gamma_hat = a.gamma_hat + 2.0 * b.gamma_hat;
    sum.B = a.B + 2.0 * b.B;
    CHECK((build_generator(sum) - build_generator(a) - 2.0 * build_generator(b)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("validation") {
  RateModel m;
  m.gamma_hat = Vec3(0.1, -0.05, 0.1).asDiagonal();
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(build_generator(m), Error);
  m.gamma_hat << 0.1, 0.2, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0, 0.1;  // not symmetric
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_NOTHROW(RateModel::nmr(0.1, 0.0).validate());
}

TEST_CASE("symmetrized target") {
  const double g = 0.37;
  CHECK((symmetrized_target(RateModel::nmr(0.0, g)) - (2 * g / 3) * Mat3::Identity()).norm() < 1e-15);
  CHECK((symmetrized_target(RateModel::nmr(g, g)) - 2 * g * Mat3::Identity()).norm() < 1e-15);
  CHECK((symmetrized_target(RateModel::nmr(1.0, 4.0)) - 4.0 * Mat3::Identity()).norm() < 1e-15);
  RateModel m = RateModel::nmr(0.1, 0.2);
  m.gamma_hat(0, 1) = m.gamma_hat(1, 0) = 0.01;
  try {
    symmetrized_target(m);
    FAIL("expected NotNmrForm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNmrForm);
  }
}

TEST_CASE("4p longitudinal rate") {
  const double g = 0.3;
  CHECK(effective_T1_4p(RateModel::nmr(g, 0.7), -1.0) == doctest::Approx(2 * g));
  CHECK(effective_T1_4p(RateModel::nmr(g, 0.0), 1.0 / 3.0) == doctest::Approx(4 * g / 3));
  CHECK(effective_T1_4p(RateModel::nmr(0.0, 1.0), -0.7086) == doctest::Approx(0.1457));
}

TEST_CASE("scaling multiplies rates and field") {
  const RateModel m = RateModel::nmr(0.1, 0.2, Vec3(1, 2, 3)).scaled(0.5);
  CHECK(m.gamma() == doctest::Approx(0.05));
  CHECK(m.gamma_phi() == doctest::Approx(0.1));
  CHECK(m.B.z() == doctest::Approx(1.5));
}
