#include "softdd/pulse_shapes.hpp"
#include "softdd/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace softdd;

namespace {

double integrate_waveform(const PulseShape& s) {
  const PanelGrid g = composite_gauss(0.0, s.tau_p(), 64);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * evaluate_waveform(s, g.nodes[i]);
  return sum;
}

}  // namespace

TEST_CASE("catalogue rows are stored as tabulated") {
  const PulseShape f1 = catalogue_lookup("F1");
  const std::vector<double> row{0.5, -1.419474, -2.048028, 1.549555, 1.435813, -0.017867};
  REQUIRE(f1.cos_coeffs().size() == row.size());
  for (std::size_t i = 0; i < row.size(); ++i) CHECK(f1.cos_coeffs()[i] == row[i]);

  const PulseShape d = catalogue_lookup("delta_pi");
  CHECK(d.kind() == ShapeKind::Delta);
  CHECK(d.phi0() == doctest::Approx(kPi));

  const PulseShape w = catalogue_lookup("W22_pi");
  CHECK(w.cos_coeffs()[0] == 0.5);
  CHECK(w.cos_coeffs()[1] == 2.776007);
  CHECK(w.cos_coeffs().size() == 8);
  CHECK(catalogue_lookup("W11_pi2").cos_coeffs().size() == 6);
  CHECK(catalogue_lookup("W12_pi").cos_coeffs().size() == 8);

  CHECK(catalogue_lookup("W11_pi").corrupted_source());
  CHECK(catalogue_lookup("W21_pi2").sign_corrected());
  CHECK_FALSE(catalogue_lookup("W21_pi").sign_corrected());
  CHECK_THROWS_AS(catalogue_lookup("S1"), Error);
}

TEST_CASE("waveform examples") {
  // W22(pi) row sums to zero, so V vanishes at the edges
  CHECK(std::abs(evaluate_waveform(catalogue_lookup("W22_pi"), 0.0)) < 1e-5);
  const PulseShape flat = PulseShape::fourier({0.5});
  for (double t : {0.0, 0.13, 0.5, 1.0}) CHECK(evaluate_waveform(flat, t) == doctest::Approx(kPi));

  // peak of G_{0.10}: phi0 / (sqrt(2 pi) x) divided by the truncated mass
  const PulseShape g = catalogue_lookup("G010_pi");
  CHECK(evaluate_waveform(g, 0.5) == doctest::Approx(kPi * 3.9894250911642732).epsilon(1e-12));
  CHECK(peak_amplitude(g) == doctest::Approx(kPi * 3.9894250911642732).epsilon(1e-12));

  CHECK_THROWS_AS(evaluate_waveform(catalogue_lookup("delta_pi"), 0.2), Error);
  CHECK_THROWS_AS(evaluate_waveform(g, 1.5), Error);
  CHECK_THROWS_AS(evaluate_waveform(g, -0.1), Error);
  try {
    evaluate_waveform(catalogue_lookup("delta_pi"), 0.2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DeltaNotPointwise);
  }
}

TEST_CASE("phase of a delta pulse is a step at the midpoint") {
  const PulseShape d = catalogue_lookup("delta_pi");
  CHECK(phase(d, 0.25) == 0.0);
  CHECK(phase(d, 0.75) == doctest::Approx(kPi));
  CHECK(phase(d, 0.5) == doctest::Approx(kPi));
  CHECK(symmetrized_angle(d, 0.25) == doctest::Approx(-kPi / 2));
}

TEST_CASE("every registry shape is normalized and symmetric") {
  const auto& reg = ShapeRegistry::builtin();
  for (const auto& name : reg.names()) {
    CAPTURE(name);
    const PulseShape s = reg.lookup(name);
    CHECK(phase(s, 0.0) == doctest::Approx(0.0));
    CHECK(phase(s, s.tau_p()) == doctest::Approx(s.phi0()).epsilon(1e-12));
    if (s.kind() == ShapeKind::Delta) continue;
    if (s.kind() == ShapeKind::Fourier) {
      CHECK(s.phi0() == doctest::Approx(2 * kPi * s.cos_coeffs()[0]).epsilon(1e-15));
    }
    if (s.kind() == ShapeKind::Gaussian && s.width() < 0.05) continue;  // narrow peak, checked below
    CHECK(std::abs(integrate_waveform(s) - s.phi0()) < 1e-10);
    CHECK(symmetry_defect(s) < 1e-12);
    for (double t : {0.03, 0.21, 0.37, 0.49}) {
      CHECK(symmetrized_angle(s, s.tau_p() - t) == doctest::Approx(-symmetrized_angle(s, t)).epsilon(1e-12));
      CHECK(evaluate_waveform(s, s.tau_p() - t) == doctest::Approx(evaluate_waveform(s, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("narrow Gaussian integrates to phi0 on a fine grid") {
  const PulseShape s = catalogue_lookup("G001_pi");
  const PanelGrid g = composite_gauss(0.0, 1.0, 1024);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * evaluate_waveform(s, g.nodes[i]);
  CHECK(sum == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("W-family smoothness constraints") {
  // s = 1 rows: sum A_n = 0; W12(pi) is an s = 2 row: also sum n^2 A_n = 0
  for (const char* name : {"W11_pi", "W21_pi", "W22_pi", "W31_pi", "W32_pi", "W11_pi2", "W12_pi2", "W21_pi2",
                           "W22_pi2"}) {
    CAPTURE(name);
    if (std::string(name) == "W11_pi") continue;  // corrupted source row
    const PulseShape shape = catalogue_lookup(name);
    const auto c = shape.cos_coeffs();
    CHECK(std::abs(std::accumulate(c.begin(), c.end(), 0.0)) < 1e-5);
  }
  const PulseShape w12_shape = catalogue_lookup("W12_pi");
  const auto w12 = w12_shape.cos_coeffs();
  double s0 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < w12.size(); ++n) {
    s0 += w12[n];
    s2 += static_cast<double>(n * n) * w12[n];
  }
  CHECK(std::abs(s0) < 1e-5);
  CHECK(std::abs(s2) < 5e-4);
}

TEST_CASE("registry text format") {
  const ShapeRegistry reg = ShapeRegistry::parse(R"(
# custom rows
S1x      pi     fourier  0.5 -0.6 0.1
flat2    pi/2   fourier  0.25
wide     pi     gaussian 0.2
skew     pi     fourier  0.5 0.1 | 0.2
)",
                                             ShapeRegistry::builtin());
  CHECK(reg.lookup("S1x").cos_coeffs().size() == 3);
  CHECK(reg.lookup("flat2").phi0() == doctest::Approx(kPi / 2));
  CHECK(reg.lookup("wide").width() == doctest::Approx(0.2));
  CHECK(reg.lookup("skew").sin_coeffs().size() == 2);
  CHECK(symmetry_defect(reg.lookup("skew")) > 0.1);
  CHECK(reg.lookup("delta:pi/3").phi0() == doctest::Approx(kPi / 3));
  CHECK(reg.contains("G010_pi"));  // built-in base is kept

  CHECK_THROWS_AS(ShapeRegistry::parse("bad pi fourier 0.3 0.1"), Error);  // phi0 != 2 pi A0
  CHECK_THROWS_AS(ShapeRegistry::parse("bad pi sawtooth 1"), Error);
  CHECK_THROWS_AS(reg.lookup("nope"), Error);

  // dump round-trips
  const ShapeRegistry again = ShapeRegistry::parse(ShapeRegistry::builtin().dump(), ShapeRegistry());
  for (const auto& name : ShapeRegistry::builtin().names()) {
    const PulseShape a = ShapeRegistry::builtin().lookup(name), b = again.lookup(name);
    CHECK(a.kind() == b.kind());
    CHECK(a.phi0() == doctest::Approx(b.phi0()).epsilon(1e-15));
    CHECK(std::equal(a.cos_coeffs().begin(), a.cos_coeffs().end(), b.cos_coeffs().begin(), b.cos_coeffs().end()));
    CHECK(a.corrupted_source() == b.corrupted_source());
  }
}

TEST_CASE("scaled shapes rescale the angle") {
  const PulseShape g = catalogue_lookup("G010_pi");
  const PulseShape h = g.scaled(0.5);
  CHECK(h.phi0() == doctest::Approx(kPi / 2));
  CHECK(evaluate_waveform(h, 0.3) == doctest::Approx(0.5 * evaluate_waveform(g, 0.3)));
}

TEST_CASE("random Fourier rows satisfy the normalization exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 25; ++i) {
    std::vector<double> a{0.5};
    for (int n = 0; n < 6; ++n) a.push_back(u(rng));
    const PulseShape s = PulseShape::fourier(a);
    CHECK(phase(s, 1.0) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(std::abs(integrate_waveform(s) - kPi) < 1e-10);
  }
}
