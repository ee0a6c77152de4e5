#include "softdd/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace softdd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("presets resolve") {
  const auto names = preset_names();
  for (const char* n : {"fig3", "fig4", "fig5", "fig6", "fig7", "table1"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  const ExperimentConfig fig3 = preset_config("fig3");
  CHECK(fig3.jobs.size() == 4);
  CHECK(fig3.spec.noise.tau_c == 8.0);
  CHECK(fig3.spec.noise.B0 == doctest::Approx(0.1));
  CHECK(fig3.spec.horizon == 512.0);
  CHECK(fig3.spec.model.gamma_phi() == doctest::Approx(2 * kPi * 1e-3));
  CHECK(fig3.emit_single);

  const ExperimentConfig fig4 = preset_config("fig4");  // inherits fig3
  CHECK(fig4.spec.noise.B0 == 0.0);
  CHECK(fig4.spec.noise.tau_c == 8.0);
  CHECK(fig4.jobs.size() == 12);
  CHECK(preset_config("table1").kind == "coefficients");
  CHECK_THROWS_AS(preset_config("fig9"), Error);
}

TEST_CASE("config validation") {
  CHECK(code_of(R"({"sequences": ["4p"], "colour": 1})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"sequences": ["4p"], "noise": {"sigma": 1}})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"sequences": ["4p"], "horizon": "lots"})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"sequences": []})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "coefficients"})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"sequences": ["4p"], "model": {"gamma": -1}})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"base": "nope", "sequences": ["4p"]})") == ErrorCode::ConfigError);
  try {
    parse_config("{\n  \"sequences\": [\"4p\"],\n  \"horizon\": ,\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  const ExperimentConfig c = parse_config(R"({"sequences": ["4p"], "shapes": ["F1"], "model": {"gamma_phi": "pi/100"}})");
  CHECK(c.spec.model.gamma_phi() == doctest::Approx(kPi / 100));
  CHECK(c.jobs[0].label() == "4p_F1");
}

TEST_CASE("horizon must be commensurate") {
  EnsembleSpec spec;
  spec.horizon = 10.0;
  spec.realizations = 1;
  CHECK_THROWS_AS(run_ensemble({{"4p", "F1"}}, spec), Error);
}

TEST_CASE("small ensemble: shapes of the outputs") {
  EnsembleSpec spec;
  spec.model = RateModel::nmr(0.0, 2 * kPi * 1e-3);
  spec.horizon = 64.0;
  spec.realizations = 6;
  spec.noise.seed = 11;
  const auto res = run_ensemble({{"none", "none"}, {"8s", "G010_pi"}}, spec);
  REQUIRE(res.size() == 2);
  CHECK(res[0].times.size() == 65);
  CHECK(res[1].times.size() == 9);
  CHECK(res[1].noisy.F_avg.front() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < res[1].times.size(); ++i) {
    CHECK(res[1].delta_F[i] == doctest::Approx(res[1].F_noiseless[i] - res[1].noisy.F_avg[i]));
    CHECK(res[1].noisy.F_avg[i] <= 1.0 + 1e-9);
    CHECK(res[1].noisy.F_avg[i] >= -1e-9);
  }
  CHECK(paired_stderr(res[0], 64, res[1], 8) > 0.0);

  // noiseless: delta F vanishes
  spec.noise.B0 = 0.0;
  const auto quiet = run_ensemble({{"8s", "G010_pi"}}, spec);
  for (double d : quiet[0].delta_F) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("ensembles do not depend on the worker count") {
  EnsembleSpec spec;
  spec.model = RateModel::nmr(0.0, 2 * kPi * 1e-3);
  spec.horizon = 32.0;
  spec.realizations = 5;
  spec.noise.seed = 21;
  spec.jobs = 1;
  const auto a = run_ensemble({{"4p", "F1"}}, spec);
  spec.jobs = 3;
  const auto b = run_ensemble({{"4p", "F1"}}, spec);
  CHECK(a[0].noisy.F_avg == b[0].noisy.F_avg);
  CHECK(a[0].noisy.stderr_ == b[0].noisy.stderr_);
}

TEST_CASE("run writes identical CSV bodies for identical configs") {
  const auto base = std::filesystem::temp_directory_path() / "softdd_run_test";
  std::filesystem::remove_all(base);
  ExperimentConfig c = parse_config(R"({"name": "mini", "sequences": ["none", "4p", "8s"], "shapes": ["F1"],
      "model": {"gamma_phi": "2*pi/1000"}, "horizon": 32, "realizations": 3, "seed": 5, "emit_single": true})");
  const RunSummary r1 = run(c, base / "a");
  c.spec.jobs = 2;
  const RunSummary r2 = run(c, base / "b");
  CHECK(r1.failed.empty());
  REQUIRE(r1.files.size() == r2.files.size());
  for (const char* f : {"none.csv", "4p_F1.csv", "8s_F1.csv", "4p_F1.single.csv"}) {
    CAPTURE(f);
    CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
  }
  const std::string csv = slurp(base / "a" / "4p_F1.csv");
  CHECK(csv.rfind("t,F_avg,stderr,F_ideal,F_redist,delta_F\n", 0) == 0);
  CHECK(slurp(base / "a" / "manifest.json").find("\"master\": 5") != std::string::npos);
  std::filesystem::remove_all(base);
}

TEST_CASE("failed jobs are listed, the rest still run") {
  const auto dir = std::filesystem::temp_directory_path() / "softdd_run_fail";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = parse_config(R"({"jobs": [{"sequence": "4p", "shape": "F1"},
      {"sequence": "4p", "shape": "delta_pi2"}], "horizon": 16, "realizations": 2})");
  const RunSummary r = run(c, dir);
  REQUIRE(r.failed.size() == 1);
  CHECK(r.failed[0] == "4p_delta_pi2");
  CHECK(std::filesystem::exists(dir / "4p_F1.csv"));
  CHECK(slurp(dir / "manifest.json").find("AngleMismatch") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("coefficient table") {
  const std::string csv = coefficient_table_csv({"delta_pi", "W11_pi"});
  CHECK(csv.rfind("shape,phi0,upsilon,upsilon2,alpha_half,alpha2_half,zeta,zeta2,mu,alpha,alpha2,flags\n", 0) == 0);
  CHECK(csv.find("corrupted_source") != std::string::npos);
  CHECK(format_number(0.25) == "2.500000000000e-01");
}
