#pragma once

#include "softdd/core.hpp"

#include <cstdint>
#include <filesystem>

namespace softdd {

/// Three independent stationary Gaussian components with covariance
/// <B_mu(t) B_nu(t')> = delta_mu_nu B0^2 exp(-(t - t')^2 / 2 tau_c^2).
struct NoiseSpec {
  double B0 = 0.1;            // r.m.s. amplitude, rad / tau_p
  double tau_c = 8.0;         // correlation time, tau_p
  double dt = 1.0 / 32.0;     // sample step
  double T_total = 512.0;     // covered duration
  std::uint64_t seed = 0;

  /// InvalidArgument for bad values, GridTooCoarse if dt > tau_c / 4.
  void validate() const;
};

struct NoiseRealization {
  double dt = 0.0;
  double B0 = 0.0;
  double tau_c = 0.0;
  std::uint64_t seed = 0;
  Eigen::Matrix<double, 3, Eigen::Dynamic> samples;  // column j is B(j dt)

  std::size_t size() const { return static_cast<std::size_t>(samples.cols()); }
  double duration() const { return dt * (samples.cols() - 1); }

  /// Linear interpolation; clamps beyond the last sample.
  Vec3 at(double t) const;
};

/// Independent stream seed for `index` under `master` (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Circulant-embedding synthesis. The periodic extension has length
/// >= T_total + 8 tau_c rounded up to a power of two; negative round-off
/// eigenvalues of the embedding are clamped to zero. Component mu draws from
/// derive_seed(seed, mu).
NoiseRealization generate(const NoiseSpec& spec);

/// Little-endian layout: uint64 N, f64 dt, f64 B0, f64 tau_c, uint64 seed,
/// then 3N f64 values (component-major).
void save_realization(const NoiseRealization& noise, const std::filesystem::path& path);
NoiseRealization load_realization(const std::filesystem::path& path);

}  // namespace softdd
