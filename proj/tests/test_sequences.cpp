#include "softdd/sequences.hpp"

#include <doctest.h>

using namespace softdd;

namespace {

double dev(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hard pi pulse about x") {
  const Sequence x = catalogue_sequence("X", catalogue_lookup("delta_pi"));
  CHECK(dev(control_rotation(x, 0.5 - 1e-9), Mat3::Identity()) < 1e-15);
  CHECK(dev(control_rotation(x, 0.5 + 1e-9), Vec3(1, -1, -1).asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("rotation sense") {
  // Q0 = exp(-phi [x x]): a quarter turn about x sends y to -z.
  const Sequence x = make_sequence("X", catalogue_lookup("delta_pi2"));
  const Mat3 q = control_rotation(x, 1.0);
  CHECK((q * Vec3::UnitY() + Vec3::UnitZ()).norm() < 1e-15);
  // Written order is an operator product: the right token acts first.
  const Sequence xy = make_sequence("X Y", catalogue_lookup("delta_pi2"));
  CHECK(dev(control_rotation(xy, 1.0), active_rotation(Vec3::UnitY(), -kPi / 2)) < 1e-15);
  CHECK(dev(control_rotation(xy, 2.0),
            active_rotation(Vec3::UnitX(), -kPi / 2) * active_rotation(Vec3::UnitY(), -kPi / 2)) < 1e-15);
}

TEST_CASE("catalogue shapes") {
  const PulseShape d = catalogue_lookup("delta_pi");
  const Sequence s4 = catalogue_sequence("4p", d);
  CHECK(s4.size() == 4);
  CHECK(s4.period() == doctest::Approx(4.0));
  CHECK(s4.dsl() == "X Y -X Y");

  const Sequence s8 = catalogue_sequence("8s", d);
  const Sequence s16 = catalogue_sequence("16a", d);
  REQUIRE(s16.size() == 16);
  for (int k = 0; k < 8; ++k) {
    CHECK(s16.pulses()[k].sign == s8.pulses()[k].sign);
    CHECK(s16.pulses()[k + 8].sign == -s8.pulses()[k].sign);
    CHECK(s16.pulses()[k + 8].axis == s8.pulses()[k].axis);
  }
  CHECK(catalogue_sequence("12", catalogue_lookup("delta_pi2")).size() == 12);
  CHECK(catalogue_sequence("24", catalogue_lookup("delta_pi2")).size() == 24);
  CHECK(catalogue_sequence("48", catalogue_lookup("delta_pi2")).size() == 48);
  const Sequence w = catalogue_sequence("5", catalogue_lookup("delta_pi2"));
  CHECK(w.size() == 5);
  int free_slots = 0;
  for (const auto& p : w.pulses()) free_slots += p.free ? 1 : 0;
  CHECK(free_slots == 1);
}

TEST_CASE("catalogue errors") {
  try {
    catalogue_sequence("4p", catalogue_lookup("delta_pi2"));
    FAIL("expected AngleMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AngleMismatch);
  }
  try {
    catalogue_sequence("24", catalogue_lookup("G010_pi"));
    FAIL("expected AngleMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AngleMismatch);
  }
  try {
    catalogue_sequence("CPMG", catalogue_lookup("delta_pi"));
    FAIL("expected UnknownSequence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownSequence);
  }
  CHECK_THROWS_AS(make_sequence("X Z", catalogue_lookup("delta_pi")), Error);
}

TEST_CASE("DSL parsing") {
  const auto p = parse_dsl("X^{pi/2} -Y 0", kPi);
  REQUIRE(p.size() == 3);
  CHECK(p[0].scale == doctest::Approx(0.5));
  CHECK(p[1].sign == -1);
  CHECK(p[1].axis == Vec3::UnitY());
  CHECK(p[2].free);
  for (const auto& name : catalogue_sequence_names()) {
    CAPTURE(name);
    const PulseShape s = name == "5" || name == "12" || name == "24" || name == "48" ? catalogue_lookup("delta_pi2")
                                                                                      : catalogue_lookup("delta_pi");
    const Sequence a = catalogue_sequence(name, s);
    const Sequence b = make_sequence(canonical_dsl(name), s);
    CHECK(a.dsl() == b.dsl());
  }
}

TEST_CASE("control rotations are proper and periodic") {
  for (const char* shape : {"delta_pi", "G010_pi", "F1", "W21_pi"}) {
    for (const char* name : {"2s", "2a", "4a", "4p", "8s", "8a", "16a"}) {
      CAPTURE(shape);
      CAPTURE(name);
      const Sequence seq = catalogue_sequence(name, catalogue_lookup(shape));
      CHECK(dev(control_rotation(seq, 0.0), Mat3::Identity()) < 1e-15);
      for (double t = 0.0; t <= seq.period(); t += 0.173) {
        const Mat3 q = control_rotation(seq, t);
        CHECK(dev(q.transpose() * q, Mat3::Identity()) < 1e-10);
        CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(dev(control_rotation(seq, seq.period()), Mat3::Identity()) < 1e-8);
    }
  }
  const Sequence s2a = catalogue_sequence("2a", catalogue_lookup("delta_pi"));
  CHECK(dev(control_rotation(s2a, 2.0), Mat3::Identity()) < 1e-15);
  for (const char* name : {"12", "24", "48"}) {
    CAPTURE(name);
    const Sequence seq = catalogue_sequence(name, catalogue_lookup("G010_pi2"));
    CHECK(dev(control_rotation(seq, seq.period()), Mat3::Identity()) < 1e-8);
  }
}
