#include "softdd/experiment.hpp"

#include "softdd/parallel.hpp"
#include "softdd/propagator.hpp"
#include "softdd/shape_coeffs.hpp"
#include "softdd/shape_designer.hpp"

#include "presets_embedded.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace softdd {

using nlohmann::json;

std::string format_number(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << std::scientific << x;
  return out.str();
}

PulseShape resolve_shape(std::string_view name, const ShapeRegistry& registry, std::uint64_t design_seed) {
  if (designed_preset(name)) return designed_shape(name, design_seed).shape;
  return registry.lookup(name);
}

std::string Job::label() const { return sequence == "none" ? "none" : sequence + "_" + shape; }

namespace {

struct PreparedJob {
  Job job;
  Sequence seq;
  double dt;
  double upsilon2;
  int periods;
};

PreparedJob prepare(const Job& job, const EnsembleSpec& spec) {
  const PulseShape shape = job.sequence == "none" ? PulseShape::delta(kPi).with_name("none")
                                                  : resolve_shape(job.shape, spec.registry, spec.design_seed);
  Sequence seq = make_sequence(job.sequence, shape);
  const double dt = spec.dt > 0.0 ? spec.dt : auto_step(seq);
  const double ratio = spec.horizon / seq.period();
  const auto periods = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - periods) > 1e-9 * ratio) {
    throw Error(ErrorCode::ConfigError, "horizon " + format_number(spec.horizon) +
                                            " is not a multiple of the period of " + seq.name());
  }
  const double u2 = job.sequence == "none" ? -1.0 : compute_coefficients(shape).upsilon2;
  // Fail early on step-guard violations rather than inside the worker pool.
  propagate(seq, spec.model, nullptr, 0, dt);
  return {job, std::move(seq), dt, u2, periods};
}

}  // namespace

std::vector<JobResult> run_ensemble(const std::vector<Job>& jobs, const EnsembleSpec& spec) {
  spec.model.validate();
  spec.noise.validate();
  if (spec.realizations < 1) throw Error(ErrorCode::ConfigError, "realizations must be >= 1");

  std::vector<PreparedJob> prepared;
  prepared.reserve(jobs.size());
  for (const auto& j : jobs) prepared.push_back(prepare(j, spec));

  std::vector<JobResult> results(prepared.size());
  for (std::size_t k = 0; k < prepared.size(); ++k) {
    const PreparedJob& p = prepared[k];
    JobResult& r = results[k];
    r.job = p.job;
    r.period = p.seq.period();
    r.dt = p.dt;
    r.upsilon2 = p.upsilon2;
    const EvolutionRecord clean = propagate(p.seq, spec.model, nullptr, p.periods, p.dt);
    r.times = clean.times;
    r.Q_noiseless = clean.Q;
    r.F_noiseless = average_fidelity(clean);
    r.fitted = fit_effective_rates(r.times, r.Q_noiseless);
    r.samples.assign(spec.realizations, {});
  }

  NoiseSpec noise = spec.noise;
  noise.T_total = spec.horizon;
  parallel_for(static_cast<std::size_t>(spec.realizations), spec.jobs, [&](std::size_t i) {
    NoiseSpec ns = noise;
    ns.seed = derive_seed(spec.noise.seed, i);
    const NoiseRealization b = generate(ns);
    for (std::size_t k = 0; k < prepared.size(); ++k) {
      const PreparedJob& p = prepared[k];
      results[k].samples[i] = average_fidelity(propagate(p.seq, spec.model, &b, p.periods, p.dt));
    }
  });

  for (JobResult& r : results) {
    r.noisy = ensemble_mean(r.times, r.samples);
    FidelitySeries clean;
    clean.times = r.times;
    clean.F_avg = r.F_noiseless;
    r.delta_F = decoupling_error(r.noisy, clean);
    const double gamma_phi = spec.model.gamma_phi();
    for (double t : r.times) {
      r.F_ideal.push_back(ideal_fidelity(spec.model, t));
      r.F_redist.push_back(redistribution_fidelity(t, gamma_phi, r.upsilon2));
    }
  }
  return results;
}

double paired_stderr(const JobResult& a, std::size_t ia, const JobResult& b, std::size_t ib) {
  const std::size_t n = std::min(a.samples.size(), b.samples.size());
  if (n < 2) return 0.0;
  NeumaierSum sum;
  for (std::size_t i = 0; i < n; ++i) sum.add(a.samples[i][ia] - b.samples[i][ib]);
  const double mean = sum.value() / n;
  NeumaierSum sq;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.samples[i][ia] - b.samples[i][ib] - mean;
    sq.add(d * d);
  }
  return std::sqrt(sq.value() / (n - 1) / n);
}

// ------------------------------------------------------------------ config

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : embedded_presets()) names.emplace_back(p.name);
  return names;
}

namespace {

json preset_json(std::string_view name) {
  for (const auto& p : embedded_presets()) {
    if (p.name == name) return json::parse(p.text);
  }
  throw Error(ErrorCode::ConfigError, "unknown preset '" + std::string(name) + "'");
}

json resolve_inheritance(json j, int depth = 0) {
  if (!j.contains("base")) return j;
  if (depth > 8) throw Error(ErrorCode::ConfigError, "preset inheritance is too deep");
  if (!j["base"].is_string()) throw Error(ErrorCode::ConfigError, "field 'base' must be a string");
  json parent = resolve_inheritance(preset_json(j["base"].get<std::string>()), depth + 1);
  j.erase("base");
  parent.merge_patch(j);
  return parent;
}

double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_angle(j.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::ConfigError, "field '" + path + "' must be a number");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::ConfigError, "unknown field '" + where + key + "'");
  }
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "field '" + path + "' must be a list");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(ErrorCode::ConfigError, "field '" + path + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ConfigError, "field '" + path + "' needs 3 entries");
  return Vec3(number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]"));
}

ExperimentConfig from_json(json j) {
  j = resolve_inheritance(std::move(j));
  check_keys(j, "", {"name", "kind", "jobs", "sequences", "shapes", "model", "noise", "horizon",
                     "realizations", "seed", "dt", "workers", "design_seed", "shape_table",
                     "emit_single"});
  ExperimentConfig c;
  c.name = j.value("name", std::string("experiment"));
  c.kind = j.value("kind", std::string("ensemble"));
  if (c.kind != "ensemble" && c.kind != "coefficients") {
    throw Error(ErrorCode::ConfigError, "field 'kind' must be 'ensemble' or 'coefficients'");
  }
  if (j.contains("shape_table")) {
    c.spec.registry = ShapeRegistry::load(j["shape_table"].get<std::string>());
  }
  if (j.contains("shapes")) c.shapes = string_list(j["shapes"], "shapes");

  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, "model.", {"gamma", "gamma_phi", "gamma_matrix", "B"});
    RateModel model;
    try {
      model = RateModel::nmr(m.contains("gamma") ? number(m["gamma"], "model.gamma") : 0.0,
                             m.contains("gamma_phi") ? number(m["gamma_phi"], "model.gamma_phi") : 0.0);
      if (m.contains("gamma_matrix")) {
        const json& g = m["gamma_matrix"];
        if (!g.is_array() || g.size() != 3) {
          throw Error(ErrorCode::ConfigError, "field 'model.gamma_matrix' must be 3x3");
        }
        for (int r = 0; r < 3; ++r) model.gamma_hat.row(r) = vec3(g[r], "model.gamma_matrix").transpose();
      }
      if (m.contains("B")) model.B = vec3(m["B"], "model.B");
      model.validate();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      throw Error(ErrorCode::ConfigError, std::string("field 'model': ") + e.what());
    }
    c.spec.model = model;
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    check_keys(n, "noise.", {"B0", "tau_c", "dt"});
    if (n.contains("B0")) c.spec.noise.B0 = number(n["B0"], "noise.B0");
    if (n.contains("tau_c")) c.spec.noise.tau_c = number(n["tau_c"], "noise.tau_c");
    if (n.contains("dt")) c.spec.noise.dt = number(n["dt"], "noise.dt");
  }
  if (j.contains("horizon")) c.spec.horizon = number(j["horizon"], "horizon");
  if (j.contains("realizations")) c.spec.realizations = static_cast<int>(number(j["realizations"], "realizations"));
  if (j.contains("seed")) c.spec.noise.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("design_seed")) c.spec.design_seed = j["design_seed"].get<std::uint64_t>();
  if (j.contains("dt") && !j["dt"].is_null()) c.spec.dt = number(j["dt"], "dt");
  if (j.contains("workers")) c.spec.jobs = static_cast<int>(number(j["workers"], "workers"));
  c.emit_single = j.value("emit_single", false);

  if (c.kind == "ensemble") {
    if (j.contains("jobs")) {
      for (const auto& e : j["jobs"]) {
        check_keys(e, "jobs[].", {"sequence", "shape"});
        c.jobs.push_back({e.at("sequence").get<std::string>(), e.value("shape", std::string("delta_pi"))});
      }
    } else {
      const auto seqs = j.contains("sequences") ? string_list(j["sequences"], "sequences")
                                                : std::vector<std::string>{};
      if (c.shapes.empty() && !seqs.empty()) c.shapes = {"delta_pi"};
      for (const auto& s : seqs) {
        if (s == "none") {
          c.jobs.push_back({s, "none"});
          continue;
        }
        for (const auto& sh : c.shapes) c.jobs.push_back({s, sh});
      }
    }
    if (c.jobs.empty()) throw Error(ErrorCode::ConfigError, "no jobs: give 'jobs' or 'sequences'");
  } else if (c.shapes.empty()) {
    throw Error(ErrorCode::ConfigError, "coefficient tables need 'shapes'");
  }
  c.raw = j.dump(2);
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  try {
    return from_json(std::move(j));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig preset_config(std::string_view name) {
  const json j = preset_json(name);
  return parse_config(j.dump());
}

std::string coefficient_table_csv(const std::vector<std::string>& shapes, const ShapeRegistry& registry) {
  std::ostringstream out;
  out << "shape,phi0,upsilon,upsilon2,alpha_half,alpha2_half,zeta,zeta2,mu,alpha,alpha2,flags\n";
  for (const auto& name : shapes) {
    const PulseShape s = resolve_shape(name, registry);
    const ShapeCoefficients c = compute_coefficients(s);
    std::string flags;
    if (s.corrupted_source()) flags = "corrupted_source";
    if (s.sign_corrected()) flags = "sign_corrected";
    if (designed_preset(name)) flags = "designed";
    out << name << ',' << format_number(s.phi0());
    for (double v : {c.upsilon, c.upsilon2, c.half_alpha(), c.half_alpha2(), c.zeta, c.zeta2, c.mu,
                     c.alpha, c.alpha2}) {
      out << ',' << format_number(v);
    }
    out << ',' << flags << '\n';
  }
  return out.str();
}

// --------------------------------------------------------------------- run

namespace {

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
  return path;
}

std::string series_csv(const JobResult& r) {
  std::ostringstream out;
  out << "t,F_avg,stderr,F_ideal,F_redist,delta_F\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << format_number(r.times[i]) << ',' << format_number(r.noisy.F_avg[i]) << ','
        << format_number(r.noisy.stderr_[i]) << ',' << format_number(r.F_ideal[i]) << ','
        << format_number(r.F_redist[i]) << ',' << format_number(r.delta_F[i]) << '\n';
  }
  return out.str();
}

std::string single_csv(const JobResult& r) {
  std::ostringstream out;
  out << "t,F\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << format_number(r.times[i]) << ',' << format_number(r.samples.front()[i]) << '\n';
  }
  return out.str();
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunSummary summary;
  json manifest;
  manifest["name"] = config.name;
  manifest["kind"] = config.kind;
  manifest["version"] = SOFTDD_VERSION;
  manifest["created"] = timestamp();
  manifest["config"] = json::parse(config.raw);
  manifest["failed"] = json::array();

  if (config.kind == "coefficients") {
    std::vector<std::string> ok;
    for (const auto& s : config.shapes) {
      try {
        compute_coefficients(resolve_shape(s, config.spec.registry, config.spec.design_seed));
        ok.push_back(s);
      } catch (const Error& e) {
        summary.failed.push_back(s);
        manifest["failed"].push_back({{"shape", s}, {"error", e.what()}});
      }
    }
    summary.files.push_back(write_text(out_dir / (config.name + ".csv"),
                                       coefficient_table_csv(ok, config.spec.registry)));
    manifest["tolerances"] = {{"quadrature_abs", QuadratureOptions{}.tolerance}};
  } else {
    std::vector<Job> good;
    for (const auto& job : config.jobs) {
      try {
        prepare(job, config.spec);
        good.push_back(job);
      } catch (const Error& e) {
        summary.failed.push_back(job.label());
        manifest["failed"].push_back({{"job", job.label()}, {"error", e.what()}});
      }
    }
    const std::vector<JobResult> results = run_ensemble(good, config.spec);
    json jobs = json::array();
    for (const auto& r : results) {
      summary.files.push_back(write_text(out_dir / (r.job.label() + ".csv"), series_csv(r)));
      if (config.emit_single) {
        summary.files.push_back(write_text(out_dir / (r.job.label() + ".single.csv"), single_csv(r)));
      }
      jobs.push_back({{"label", r.job.label()},
                      {"sequence", r.job.sequence},
                      {"shape", r.job.shape},
                      {"period", r.period},
                      {"dt", r.dt},
                      {"upsilon2", r.upsilon2},
                      {"gamma1_eff_fit", r.fitted.gamma1},
                      {"gamma2_eff_fit", r.fitted.gamma2},
                      {"F_final", r.noisy.F_avg.back()},
                      {"delta_F_final", r.delta_F.back()}});
    }
    manifest["jobs"] = jobs;
    manifest["effective"] = {{"realizations", config.spec.realizations},
                             {"horizon", config.spec.horizon},
                             {"noise", {{"B0", config.spec.noise.B0},
                                        {"tau_c", config.spec.noise.tau_c},
                                        {"dt", config.spec.noise.dt}}},
                             {"workers", resolve_jobs(config.spec.jobs)}};
    manifest["seeds"] = {{"master", config.spec.noise.seed},
                         {"realization_seed", "derive_seed(master, i)"},
                         {"component_seed", "derive_seed(realization_seed, mu)"},
                         {"design_seed", config.spec.design_seed}};
    manifest["tolerances"] = {{"step_guard_rad", kStepGuard}, {"quadrature_abs", QuadratureOptions{}.tolerance}};
  }
  summary.files.push_back(write_text(out_dir / "manifest.json", manifest.dump(2) + "\n"));
  return summary;
}

}  // namespace softdd
