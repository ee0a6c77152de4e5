#include "softdd/magnus.hpp"
#include "softdd/propagator.hpp"

#include <doctest.h>

#include <Eigen/SVD>

using namespace softdd;

namespace {

double dev(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

RateModel generic() {
  RateModel m;
  m.gamma_hat << 0.020, 0.003, -0.004,
                 0.003, 0.015, 0.002,
                -0.004, 0.002, 0.030;
  m.B = Vec3(0.03, -0.02, 0.05);
  return m;
}

}  // namespace

TEST_CASE("frozen ODE oracle") {
  // scipy DOP853 with rtol 1e-13 on the same equation, time order X Y -X Y.
  const Sequence seq = make_sequence("Y -X Y X", catalogue_lookup("G010_pi"));
  const EvolutionRecord r = propagate(seq, generic(), nullptr, 1, 1.0 / 256.0);
  Mat3 expect;
  expect << 8.37439704034313e-01, -1.01405362237466e-02, -1.68369582584817e-02,
            9.53587124149673e-03, 8.22138182340165e-01, 1.22178021799013e-03,
            1.86102625906481e-02, 2.52351993266489e-04, 8.63017644063036e-01;
  CHECK(dev(r.Q.back(), expect) < 1e-9);
  REQUIRE(r.times.size() == 2);
  CHECK(r.times[1] == doctest::Approx(4.0));
}

TEST_CASE("free decay has a closed form") {
  const double gp = 2 * kPi * 1e-3;
  const Sequence none = catalogue_sequence("none", catalogue_lookup("delta_pi"));
  const EvolutionRecord r = propagate(none, RateModel::nmr(0.0, gp), nullptr, 100, 1.0 / 32.0);
  for (std::size_t s = 0; s < r.times.size(); s += 10) {
    const double e = std::exp(-gp * r.times[s]);
    CHECK(dev(r.Q[s], Vec3(e, e, 1.0).asDiagonal().toDenseMatrix()) < 1e-8);
  }
}

TEST_CASE("pure rotation stays orthogonal") {
  RateModel m;
  m.B = Vec3(0.2, -0.1, 0.3);
  NoiseSpec ns;
  ns.T_total = 112.0;
  ns.seed = 9;
  const NoiseRealization noise = generate(ns);
  const Sequence seq = catalogue_sequence("8s", catalogue_lookup("F1"));
  const EvolutionRecord r = propagate(seq, m, &noise, 14, auto_step(seq));
  CHECK(dev(r.Q.back().transpose() * r.Q.back(), Mat3::Identity()) < 1e-8);
  CHECK(r.noise_seed.value() == 9);
}

TEST_CASE("contraction with positive rates") {
  NoiseSpec ns;
  ns.T_total = 64.0;
  ns.seed = 4;
  const NoiseRealization noise = generate(ns);
  const Sequence seq = catalogue_sequence("4p", catalogue_lookup("G010_pi"));
  const EvolutionRecord r = propagate(seq, generic(), &noise, 16, 1.0 / 64.0);
  for (const Mat3& q : r.Q) CHECK(Eigen::JacobiSVD<Mat3>(q).singularValues()(0) <= 1.0 + 1e-8);
}

TEST_CASE("RK4 is fourth order in the step") {
  // strong rates so that the slow-frame error dominates round-off
  const Sequence seq = catalogue_sequence("4p", catalogue_lookup("F1"));
  const RateModel m = generic().scaled(50.0);
  const Mat3 ref = propagate(seq, m, nullptr, 1, 1.0 / 2048.0).Q.back();
  const double e1 = dev(propagate(seq, m, nullptr, 1, 1.0 / 256.0).Q.back(), ref);
  const double e2 = dev(propagate(seq, m, nullptr, 1, 1.0 / 512.0).Q.back(), ref);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("step guard and grid checks") {
  const Sequence seq = catalogue_sequence("4p", catalogue_lookup("F1"));
  try {
    propagate(seq, generic(), nullptr, 1, 1.0 / 16.0);
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
  CHECK_THROWS_AS(propagate(seq, generic(), nullptr, 1, 0.3), Error);  // not an even divisor
  NoiseSpec ns;
  ns.T_total = 2.0;
  const NoiseRealization shortnoise = generate(ns);
  CHECK_THROWS_AS(propagate(seq, generic(), &shortnoise, 1, 1.0 / 256.0), Error);
  const double dt = auto_step(seq);
  CHECK(peak_amplitude(seq.shape()) * dt <= kStepGuard);
  CHECK(auto_step(catalogue_sequence("4p", catalogue_lookup("delta_pi"))) == 1.0 / 32.0);
}

TEST_CASE("columns propagate linearly") {
  const Sequence seq = catalogue_sequence("8s", catalogue_lookup("W21_pi"));
  const Mat3 q = propagate(seq, generic(), nullptr, 2, 1.0 / 256.0).Q.back();
  const Vec3 r0(0.3, -0.5, 0.8);
  CHECK((q * r0 - (0.3 * q.col(0) - 0.5 * q.col(1) + 0.8 * q.col(2))).norm() < 1e-15);
}

TEST_CASE("cumulant route agrees with the ODE through second order") {
  // 16a with a static field: the defect falls by about 8 when all rates halve.
  const Sequence seq = catalogue_sequence("16a", catalogue_lookup("G010_pi"));
  const RateModel m = RateModel::nmr(0.0, 2 * kPi * 1e-3, Vec3(0.04, -0.03, 0.05)).scaled(2.0);
  auto defect = [&](const RateModel& model) {
    const CumulantResult c = cumulants(seq, model);
    const Mat3 q = propagate(seq, model, nullptr, 1, 1.0 / 128.0).Q.back();
    return dev(q, c.period_rotation * effective_evolution(c, 1.0));
  };
  const double ratio = defect(m) / defect(m.scaled(0.5));
  CHECK(ratio > 6.5);
  CHECK(ratio < 9.5);
}

TEST_CASE("product expansion defect") {
  const Sequence hard = catalogue_sequence("4p", catalogue_lookup("delta_pi"));
  CHECK(product_expansion_check(hard, RateModel{}) < 1e-14);
  const Sequence soft = catalogue_sequence("8s", catalogue_lookup("G010_pi"));
  const RateModel m = generic().scaled(0.5);
  const double ratio = product_expansion_check(soft, m) / product_expansion_check(soft, m.scaled(0.5));
  CHECK(ratio > 6.5);
  CHECK(ratio < 9.5);
}
