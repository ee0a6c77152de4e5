#include "softdd/magnus.hpp"
#include "softdd/shape_designer.hpp"

#include <doctest.h>

#include <numeric>

using namespace softdd;

TEST_CASE("target parsing") {
  const auto t = parse_targets("u, u2=1/3,z2");
  REQUIRE(t.size() == 3);
  CHECK(t[0].which == Coefficient::Upsilon);
  CHECK(t[1].value == doctest::Approx(1.0 / 3.0));
  CHECK(t[2].which == Coefficient::Zeta2);
  CHECK_THROWS_AS(parse_targets("q"), Error);
  CHECK(to_string(Coefficient::Alpha2) == "a2");
}

TEST_CASE("no targets gives the flat pulse") {
  DesignSpec s;
  s.n_harmonics = 4;
  s.smoothness = 0;
  const DesignResult r = design(s, 1);
  REQUIRE(r.shape.cos_coeffs().size() == 5);
  CHECK(r.shape.cos_coeffs()[0] == doctest::Approx(0.5));
  for (std::size_t n = 1; n < 5; ++n) CHECK(std::abs(r.shape.cos_coeffs()[n]) < 1e-12);
}

TEST_CASE("W2-class design") {
  DesignSpec s;
  s.n_harmonics = 7;
  s.smoothness = 1;
  s.targets = parse_targets("u,u2,a");
  s.restarts = 4;
  const DesignResult r = design(s, 3);
  CHECK(std::abs(r.coeffs.upsilon) < 1e-6);
  CHECK(std::abs(r.coeffs.upsilon2) < 1e-6);
  CHECK(std::abs(r.coeffs.alpha) < 1e-6);
  const auto a = r.shape.cos_coeffs();
  CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0)) < 1e-12);
  CHECK(symmetry_defect(r.shape) < 1e-12);
  // deterministic for a given seed and independent of the worker count
  const DesignResult again = design(s, 3, 2);
  CHECK(std::equal(a.begin(), a.end(), again.shape.cos_coeffs().begin()));
}

TEST_CASE("F-class design hits upsilon2 = 1/3") {
  const DesignResult& f = designed_shape("F_design");
  CHECK(std::abs(f.coeffs.upsilon2 - 1.0 / 3.0) < 1e-6);
  const RateModel m = RateModel::nmr(0.2, 1.0);
  const Vec3 d = cumulants(catalogue_sequence("4p", f.shape), m).gamma0.diagonal();
  CHECK(d.maxCoeff() - d.minCoeff() < 1e-6);
  CHECK(d(0) == doctest::Approx(symmetrized_target(m)(0, 0)).epsilon(1e-6));
}

TEST_CASE("designed presets") {
  const auto names = designed_preset_names();
  CHECK(names.size() == 3);
  const DesignResult& w = designed_shape("W11_design");
  CHECK(std::abs(w.coeffs.upsilon) < 1e-6);
  CHECK(std::abs(w.coeffs.upsilon2) < 1e-6);
  CHECK(&designed_shape("W11_design") == &w);
  const DesignResult& s = designed_shape("S_design");
  CHECK(std::abs(s.coeffs.upsilon) < 1e-6);
  CHECK_FALSE(designed_preset("G010_pi").has_value());
}

TEST_CASE("infeasible targets report NotConverged") {
  DesignSpec s;
  s.n_harmonics = 3;
  s.smoothness = 1;
  s.targets = parse_targets("u2=0.999");
  s.restarts = 2;
  try {
    design(s, 1);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}

TEST_CASE("spec validation") {
  DesignSpec s;
  s.n_harmonics = 2;
  s.smoothness = 2;
  s.targets = parse_targets("u,u2,a");  // more targets than free coordinates
  CHECK_THROWS_AS(s.validate(), Error);
}
