#pragma once

#include "softdd/fidelity.hpp"
#include "softdd/noise.hpp"
#include "softdd/pulse_shapes.hpp"
#include "softdd/rate_model.hpp"
#include "softdd/sequences.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace softdd {

/// Registry shape, designed preset (W11_design, S_design, F_design) or
/// "delta:<angle>".
PulseShape resolve_shape(std::string_view name, const ShapeRegistry& registry = ShapeRegistry::builtin(),
                         std::uint64_t design_seed = 1);

struct Job {
  std::string sequence;
  std::string shape;

  std::string label() const;
};

struct EnsembleSpec {
  RateModel model;
  NoiseSpec noise;           // noise.seed is the master seed
  double horizon = 512.0;    // tau_p
  int realizations = 400;
  double dt = 0.0;           // integrator step; 0 selects auto_step
  int jobs = 0;              // worker threads, 0 = hardware
  std::uint64_t design_seed = 1;
  ShapeRegistry registry = ShapeRegistry::builtin();
};

/// One (sequence, shape) combination. Realization i uses the noise seed
/// derive_seed(master, i) for every job, so differences between jobs are
/// paired (common random numbers).
struct JobResult {
  Job job;
  double period = 0.0;
  double dt = 0.0;
  double upsilon2 = -1.0;
  std::vector<double> times;
  std::vector<double> F_noiseless;            // controlled run with B = 0
  std::vector<Mat3> Q_noiseless;
  FidelitySeries noisy;                       // ensemble mean and standard error
  std::vector<std::vector<double>> samples;   // per-realization F
  std::vector<double> F_ideal;
  std::vector<double> F_redist;
  std::vector<double> delta_F;
  EffectiveRates fitted;                      // from Q_noiseless
};

std::vector<JobResult> run_ensemble(const std::vector<Job>& jobs, const EnsembleSpec& spec);

/// Paired standard error of (Delta F_a - Delta F_b) at checkpoint index i of
/// each job (the noiseless parts are deterministic).
double paired_stderr(const JobResult& a, std::size_t ia, const JobResult& b, std::size_t ib);

/// JSON configuration (see README). `base` names a preset that the file
/// inherits from through JSON merge-patch.
struct ExperimentConfig {
  std::string name;
  std::string kind = "ensemble";  // or "coefficients"
  std::vector<Job> jobs;
  std::vector<std::string> shapes;  // coefficient tables
  EnsembleSpec spec;
  bool emit_single = false;         // also write realization 0 per job
  std::string raw;                  // resolved JSON text
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> failed;
};

/// Writes per-job CSVs and manifest.json under out_dir. Failing jobs are
/// listed in the manifest and in the summary instead of aborting the run.
RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Table of coefficients: shape, phi0, u, u2, alpha/2, alpha2/2, zeta, zeta2,
/// mu, alpha, alpha2.
std::string coefficient_table_csv(const std::vector<std::string>& shapes,
                                  const ShapeRegistry& registry = ShapeRegistry::builtin());

/// Fixed-format number used by every CSV writer (12 significant digits).
std::string format_number(double x);

}  // namespace softdd
