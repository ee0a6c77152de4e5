// softdd command-line front end.

#include "softdd/acceptance.hpp"
#include "softdd/experiment.hpp"
#include "softdd/fidelity.hpp"
#include "softdd/magnus.hpp"
#include "softdd/noise.hpp"
#include "softdd/propagator.hpp"
#include "softdd/shape_coeffs.hpp"
#include "softdd/shape_designer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using softdd::Mat3;
using softdd::Vec3;

struct ModelArgs {
  std::string gamma = "0";
  std::string gamma_phi = "2*pi/1000";
  std::string field = "0,0,0";

  softdd::RateModel build() const {
    std::vector<double> b;
    std::stringstream ss(field);
    for (std::string item; std::getline(ss, item, ',');) b.push_back(softdd::parse_angle(item));
    if (b.size() != 3) throw softdd::Error(softdd::ErrorCode::InvalidArgument, "--field needs three components");
    return softdd::RateModel::nmr(softdd::parse_angle(gamma), softdd::parse_angle(gamma_phi),
                                  Vec3(b[0], b[1], b[2]));
  }
};

void add_model_options(CLI::App* app, ModelArgs& m) {
  app->add_option("--gamma", m.gamma, "transverse-flip rate gamma (1/tau_p)")->capture_default_str();
  app->add_option("--gamma-phi", m.gamma_phi, "dephasing rate gamma_phi (1/tau_p)")->capture_default_str();
  app->add_option("--field", m.field, "static field B as x,y,z (1/tau_p)")->capture_default_str();
}

nlohmann::json to_json(const Mat3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

softdd::ShapeRegistry registry_from(const std::string& table) {
  return table.empty() ? softdd::ShapeRegistry::builtin() : softdd::ShapeRegistry::load(table);
}

// Writes to `path`, or stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw softdd::Error(softdd::ErrorCode::IoError, "cannot write " + path);
  out << text;
}

int print_run_summary(const softdd::RunSummary& summary) {
  for (const auto& f : summary.files) std::cout << f.string() << '\n';
  for (const auto& f : summary.failed) std::cerr << "failed: " << f << '\n';
  return summary.failed.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-pulse dynamical decoupling toolkit"};
  app.require_subcommand(1);
  std::string shape_table;
  app.add_option("--shape-table", shape_table, "shape table file extending the built-in registry");

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "coefficient table CSV for the named shapes");
  std::vector<std::string> coeff_shapes;
  std::string coeff_out;
  coeffs->add_option("shapes", coeff_shapes, "shape names (default: every registry shape)");
  coeffs->add_option("--out", coeff_out, "output file (default stdout)");

  // cumulants
  auto* cum = app.add_subcommand("cumulants", "first two average-Hamiltonian cumulants as JSON");
  std::string cum_sequence = "4p", cum_shape = "G010_pi", cum_out, cum_case;
  ModelArgs cum_model;
  cum->add_option("--sequence", cum_sequence, "catalogue name or pulse string")->capture_default_str();
  cum->add_option("--shape", cum_shape, "pulse shape")->capture_default_str();
  cum->add_option("--analytic", cum_case, "also report a closed-form case (soft_4p, seq24_nmr, ...)");
  cum->add_option("--out", cum_out, "output file (default stdout)");
  add_model_options(cum, cum_model);

  // simulate
  auto* sim = app.add_subcommand("simulate", "single run: Q(t) at period boundaries as CSV");
  std::string sim_sequence = "4p", sim_shape = "G010_pi", sim_out;
  ModelArgs sim_model;
  double sim_horizon = 512.0, sim_dt = 0.0, sim_B0 = 0.0, sim_tau_c = 8.0;
  std::uint64_t sim_seed = 20060801;
  sim->add_option("--sequence", sim_sequence, "catalogue name or pulse string")->capture_default_str();
  sim->add_option("--shape", sim_shape, "pulse shape")->capture_default_str();
  sim->add_option("--horizon", sim_horizon, "total time (tau_p), rounded down to whole periods")
      ->capture_default_str();
  sim->add_option("--dt", sim_dt, "integrator step (0: automatic)")->capture_default_str();
  sim->add_option("--B0", sim_B0, "noise amplitude (0: no noise)")->capture_default_str();
  sim->add_option("--tau-c", sim_tau_c, "noise correlation time")->capture_default_str();
  sim->add_option("--seed", sim_seed, "noise seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output file (default stdout)");
  add_model_options(sim, sim_model);

  // design
  auto* des = app.add_subcommand("design", "optimize a cosine-series pulse");
  std::string des_preset, des_phi0 = "pi", des_targets = "u", des_out;
  int des_harmonics = 5, des_smooth = 1, des_restarts = 16, des_jobs = 0;
  std::optional<double> des_bound;
  std::uint64_t des_seed = 1;
  des->add_option("--preset", des_preset, "W11_design, S_design or F_design");
  des->add_option("--phi0", des_phi0, "rotation angle")->capture_default_str();
  des->add_option("--harmonics", des_harmonics, "number of cosine harmonics")->capture_default_str();
  des->add_option("--smooth,--smoothness", des_smooth, "endpoint smoothness 0, 1 or 2")->capture_default_str();
  des->add_option("--targets", des_targets, "e.g. u,u2 or u2=1/3")->capture_default_str();
  des->add_option("--bound", des_bound, "bound on peak |V| (1/tau_p)");
  des->add_option("--restarts", des_restarts, "multistart count")->capture_default_str();
  des->add_option("--seed", des_seed, "restart seed")->capture_default_str();
  des->add_option("--jobs", des_jobs, "worker threads (0: hardware)")->capture_default_str();
  des->add_option("--out", des_out, "output file (default stdout)");

  // verify
  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  softdd::AcceptanceOptions ver_opts;
  std::string ver_json;
  ver->add_option("--only", ver_opts.only, "criterion ids")->delimiter(',');
  ver->add_option("--seed", ver_opts.seed, "master seed for the ensemble checks (0: preset seed)");
  ver->add_option("--jobs", ver_opts.jobs, "worker threads (0: hardware)");
  ver->add_option("--dt", ver_opts.dt, "force this integrator step on every ODE check");
  ver->add_option("--json", ver_json, "also write a JSON report");

  // preset / run
  auto* pre = app.add_subcommand("preset", "run a shipped experiment preset");
  std::string pre_name, pre_out = "out";
  std::optional<std::uint64_t> pre_seed;
  std::optional<int> pre_jobs, pre_realizations;
  bool pre_list = false;
  pre->add_option("name", pre_name, "fig3, fig4, fig5, fig6, fig7, table1");
  pre->add_flag("--list", pre_list, "list presets");
  pre->add_option("--out", pre_out, "output directory")->capture_default_str();
  pre->add_option("--seed", pre_seed, "override the master seed");
  pre->add_option("--jobs", pre_jobs, "worker threads (0: hardware)");
  pre->add_option("--realizations", pre_realizations, "override the ensemble size");

  auto* runc = app.add_subcommand("run", "run an experiment from a JSON config file");
  std::string run_config, run_out = "out";
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_jobs;
  runc->add_option("config", run_config, "config file")->required()->check(CLI::ExistingFile);
  runc->add_option("--out", run_out, "output directory")->capture_default_str();
  runc->add_option("--seed", run_seed, "override the master seed");
  runc->add_option("--jobs", run_jobs, "worker threads (0: hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    const softdd::ShapeRegistry registry = registry_from(shape_table);

    if (*coeffs) {
      if (coeff_shapes.empty()) coeff_shapes = registry.names();
      emit(coeff_out, softdd::coefficient_table_csv(coeff_shapes, registry));
      return 0;
    }

    if (*cum) {
      const softdd::PulseShape shape = softdd::resolve_shape(cum_shape, registry);
      const softdd::Sequence seq = softdd::make_sequence(cum_sequence, shape);
      const softdd::RateModel model = cum_model.build();
      const softdd::CumulantResult r = softdd::cumulants(seq, model);
      nlohmann::json j{{"sequence", seq.name()},
                       {"pulses", seq.dsl()},
                       {"shape", shape.name()},
                       {"tau", r.tau},
                       {"periodic", r.periodic},
                       {"gamma0", to_json(r.gamma0)},
                       {"gamma1", to_json(r.gamma1)},
                       {"residual", r.residual_norm},
                       {"period_rotation", to_json(r.period_rotation)}};
      if (!cum_case.empty()) {
        const auto which = softdd::parse_analytic_case(cum_case);
        const Mat3 a = softdd::analytic_gamma0(which, model, softdd::compute_coefficients(shape));
        j["analytic"] = {{"case", std::string(softdd::to_string(which))},
                         {"gamma0", to_json(a)},
                         {"max_abs_diff", (a - r.gamma0).cwiseAbs().maxCoeff()}};
      }
      emit(cum_out, j.dump(2) + "\n");
      return 0;
    }

    if (*sim) {
      const softdd::PulseShape shape = softdd::resolve_shape(sim_shape, registry);
      const softdd::Sequence seq = softdd::make_sequence(sim_sequence, shape);
      const softdd::RateModel model = sim_model.build();
      const int periods = static_cast<int>(std::floor(sim_horizon / seq.period() + 1e-9));
      const double dt = sim_dt > 0.0 ? sim_dt : softdd::auto_step(seq);
      std::optional<softdd::NoiseRealization> noise;
      if (sim_B0 > 0.0) {
        softdd::NoiseSpec spec;
        spec.B0 = sim_B0;
        spec.tau_c = sim_tau_c;
        spec.dt = dt;
        spec.T_total = periods * seq.period();
        spec.seed = sim_seed;
        noise = softdd::generate(spec);
      }
      const auto rec = softdd::propagate(seq, model, noise ? &*noise : nullptr, periods, dt);
      std::ostringstream csv;
      csv << "t,Qxx,Qxy,Qxz,Qyx,Qyy,Qyz,Qzx,Qzy,Qzz,trace,F\n";
      for (std::size_t s = 0; s < rec.times.size(); ++s) {
        csv << softdd::format_number(rec.times[s]);
        for (int i = 0; i < 3; ++i) {
          for (int k = 0; k < 3; ++k) csv << ',' << softdd::format_number(rec.Q[s](i, k));
        }
        csv << ',' << softdd::format_number(rec.Q[s].trace()) << ','
            << softdd::format_number(softdd::fidelity_from_Q(rec.Q[s])) << '\n';
      }
      emit(sim_out, csv.str());
      return 0;
    }

    if (*des) {
      const softdd::DesignResult result = [&] {
        if (!des_preset.empty()) return softdd::designed_shape(des_preset, des_seed);
        softdd::DesignSpec spec;
        spec.phi0 = softdd::parse_angle(des_phi0);
        spec.n_harmonics = des_harmonics;
        spec.smoothness = des_smooth;
        spec.targets = softdd::parse_targets(des_targets);
        spec.amplitude_bound = des_bound;
        spec.restarts = des_restarts;
        return softdd::design(spec, des_seed, des_jobs);
      }();
      const auto& c = result.coeffs;
      std::vector<double> cos(result.shape.cos_coeffs().begin(), result.shape.cos_coeffs().end());
      std::ostringstream row;
      row << (des_preset.empty() ? "designed" : des_preset) << " " << result.shape.phi0() << " fourier";
      row << std::setprecision(12);
      for (double a : cos) row << ' ' << a;
      nlohmann::json j{{"cos_coeffs", cos},
                       {"coefficients",
                        {{"upsilon", c.upsilon},
                         {"upsilon2", c.upsilon2},
                         {"alpha_half", c.half_alpha()},
                         {"alpha2_half", c.half_alpha2()},
                         {"zeta", c.zeta},
                         {"zeta2", c.zeta2},
                         {"mu", c.mu}}},
                       {"peak_amplitude", softdd::peak_amplitude(result.shape)},
                       {"residual", result.residual},
                       {"restart", result.restart},
                       {"restarts", result.restarts},
                       {"shape_table_row", row.str()}};
      emit(des_out, j.dump(2) + "\n");
      return 0;
    }

    if (*ver) {
      ver_opts.registry = registry;
      ver_opts.on_result = [](const softdd::CriterionResult& r) {
        std::cout << softdd::format_result(r) << std::endl;
      };
      const auto results = softdd::run_acceptance(ver_opts);
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
      if (!ver_json.empty()) emit(ver_json, softdd::results_json(results) + "\n");
      return failed == 0 ? 0 : 1;
    }

    if (*pre) {
      if (pre_list || pre_name.empty()) {
        for (const auto& n : softdd::preset_names()) std::cout << n << '\n';
        return pre_list ? 0 : 2;
      }
      softdd::ExperimentConfig cfg = softdd::preset_config(pre_name);
      cfg.spec.registry = registry;
      if (pre_seed) cfg.spec.noise.seed = *pre_seed;
      if (pre_jobs) cfg.spec.jobs = *pre_jobs;
      if (pre_realizations) cfg.spec.realizations = *pre_realizations;
      return print_run_summary(softdd::run(cfg, pre_out));
    }

    if (*runc) {
      softdd::ExperimentConfig cfg = softdd::load_config(run_config);
      if (!shape_table.empty()) cfg.spec.registry = registry;
      if (run_seed) cfg.spec.noise.seed = *run_seed;
      if (run_jobs) cfg.spec.jobs = *run_jobs;
      return print_run_summary(softdd::run(cfg, run_out));
    }
  } catch (const std::exception& e) {
    std::cerr << "softdd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
