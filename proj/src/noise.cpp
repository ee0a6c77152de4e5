#include "softdd/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <tuple>
#include <vector>

namespace softdd {

void NoiseSpec::validate() const {
  if (!(B0 >= 0.0) || !std::isfinite(B0)) throw Error(ErrorCode::InvalidArgument, "B0 must be >= 0");
  if (!(tau_c > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_c must be positive");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise dt must be positive");
  if (!(T_total >= 0.0)) throw Error(ErrorCode::InvalidArgument, "T_total must be >= 0");
  if (dt > tau_c / 4.0) {
    throw Error(ErrorCode::GridTooCoarse, "noise dt " + std::to_string(dt) +
                                              " exceeds tau_c/4 = " + std::to_string(tau_c / 4.0));
  }
}

Vec3 NoiseRealization::at(double t) const {
  const auto n = samples.cols();
  if (n == 0) return Vec3::Zero();
  const double x = std::max(0.0, t / dt);
  const auto j = static_cast<Eigen::Index>(x);
  if (j >= n - 1) return samples.col(n - 1);
  const double f = x - static_cast<double>(j);
  return (1.0 - f) * samples.col(j) + f * samples.col(j + 1);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer allocate(std::size_t m) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
  if (!p) throw std::bad_alloc();
  return ComplexBuffer(p);
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One forward plan per size, shared by all threads through the new-array
// execute interface (buffers come from fftw_malloc, so alignment matches).
fftw_plan forward_plan(std::size_t m) {
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  auto it = plans.find(m);
  if (it != plans.end()) return it->second;
  ComplexBuffer in = allocate(m);
  ComplexBuffer out = allocate(m);
  const fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD,
                                          FFTW_ESTIMATE);
  plans.emplace(m, plan);
  return plan;
}

// sqrt(lambda_k / M) for the circulant embedding of the unit-amplitude kernel.
const std::vector<double>& spectral_weights(std::size_t m, double dt, double tau_c) {
  thread_local std::map<std::tuple<std::size_t, double, double>, std::vector<double>> cache;
  const auto key = std::make_tuple(m, dt, tau_c);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  ComplexBuffer c = allocate(m);
  ComplexBuffer lambda = allocate(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double lag = static_cast<double>(std::min(j, m - j)) * dt;
    c[j][0] = std::exp(-0.5 * lag * lag / (tau_c * tau_c));
    c[j][1] = 0.0;
  }
  fftw_execute_dft(forward_plan(m), c.get(), lambda.get());
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = std::sqrt(std::max(0.0, lambda[k][0]) / static_cast<double>(m));
  }
  return cache.emplace(key, std::move(w)).first->second;
}

}  // namespace

NoiseRealization generate(const NoiseSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::floor(spec.T_total / spec.dt + 1e-9)) + 1;

  NoiseRealization out;
  out.dt = spec.dt;
  out.B0 = spec.B0;
  out.tau_c = spec.tau_c;
  out.seed = spec.seed;
  out.samples.setZero(3, static_cast<Eigen::Index>(n));
  if (spec.B0 == 0.0) return out;

  const auto pad = static_cast<std::size_t>(std::ceil(8.0 * spec.tau_c / spec.dt));
  const std::size_t m = std::bit_ceil(n + pad);
  const std::vector<double>& w = spectral_weights(m, spec.dt, spec.tau_c);

  ComplexBuffer z = allocate(m);
  ComplexBuffer x = allocate(m);
  const fftw_plan plan = forward_plan(m);
  for (int mu = 0; mu < 3; ++mu) {
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(mu)));
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < m; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      z[k][0] = w[k] * re;
      z[k][1] = w[k] * im;
    }
    fftw_execute_dft(plan, z.get(), x.get());
    for (std::size_t j = 0; j < n; ++j) out.samples(mu, static_cast<Eigen::Index>(j)) = spec.B0 * x[j][0];
  }
  return out;
}

namespace {

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T read_le(std::istream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), 8);
  if (!in) throw Error(ErrorCode::IoError, "truncated noise file");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void save_realization(const NoiseRealization& noise, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_le<std::uint64_t>(out, noise.size());
  write_le(out, noise.dt);
  write_le(out, noise.B0);
  write_le(out, noise.tau_c);
  write_le<std::uint64_t>(out, noise.seed);
  for (int mu = 0; mu < 3; ++mu) {
    for (std::size_t j = 0; j < noise.size(); ++j) {
      write_le(out, noise.samples(mu, static_cast<Eigen::Index>(j)));
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

NoiseRealization load_realization(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  NoiseRealization noise;
  const auto n = read_le<std::uint64_t>(in);
  noise.dt = read_le<double>(in);
  noise.B0 = read_le<double>(in);
  noise.tau_c = read_le<double>(in);
  noise.seed = read_le<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 32)) throw Error(ErrorCode::IoError, "implausible sample count");
  noise.samples.resize(3, static_cast<Eigen::Index>(n));
  for (int mu = 0; mu < 3; ++mu) {
    for (std::uint64_t j = 0; j < n; ++j) {
      noise.samples(mu, static_cast<Eigen::Index>(j)) = read_le<double>(in);
    }
  }
  return noise;
}

}  // namespace softdd
