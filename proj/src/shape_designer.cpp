#include "softdd/shape_designer.hpp"

#include "softdd/noise.hpp"
#include "softdd/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace softdd {

namespace {

struct CoefName {
  std::string_view name;
  Coefficient which;
};

constexpr CoefName kNames[] = {
    {"u", Coefficient::Upsilon}, {"u2", Coefficient::Upsilon2}, {"a", Coefficient::Alpha},
    {"a2", Coefficient::Alpha2}, {"z", Coefficient::Zeta},      {"z2", Coefficient::Zeta2},
    {"mu", Coefficient::Mu},
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::string_view to_string(Coefficient c) {
  for (const auto& n : kNames) {
    if (n.which == c) return n.name;
  }
  return "?";
}

double coefficient_value(const ShapeCoefficients& c, Coefficient which) {
  switch (which) {
    case Coefficient::Upsilon: return c.upsilon;
    case Coefficient::Upsilon2: return c.upsilon2;
    case Coefficient::Alpha: return c.alpha;
    case Coefficient::Alpha2: return c.alpha2;
    case Coefficient::Zeta: return c.zeta;
    case Coefficient::Zeta2: return c.zeta2;
    case Coefficient::Mu: return c.mu;
  }
  return 0.0;
}

std::vector<Target> parse_targets(std::string_view text) {
  std::vector<Target> out;
  std::istringstream in{std::string(text)};
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    Target t;
    std::string name = item;
    if (const auto eq = item.find('='); eq != std::string::npos) {
      name = trim(item.substr(0, eq));
      t.value = parse_angle(item.substr(eq + 1));
    }
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    const auto* hit = std::find_if(std::begin(kNames), std::end(kNames),
                                   [&](const CoefName& n) { return n.name == name; });
    if (hit == std::end(kNames)) {
      throw Error(ErrorCode::InvalidArgument, "unknown design target '" + name + "'");
    }
    if (std::any_of(out.begin(), out.end(), [&](const Target& o) { return o.which == hit->which; })) {
      throw Error(ErrorCode::InvalidArgument, "duplicate design target '" + name + "'");
    }
    t.which = hit->which;
    out.push_back(t);
  }
  return out;
}

void DesignSpec::validate() const {
  if (n_harmonics < 1 || n_harmonics > 32) {
    throw Error(ErrorCode::InvalidArgument, "n_harmonics must be in [1, 32]");
  }
  if (smoothness < 0 || smoothness > 2) throw Error(ErrorCode::InvalidArgument, "smoothness must be 0, 1 or 2");
  const int free = n_harmonics - smoothness;
  if (free < 0 || static_cast<int>(targets.size()) > free) {
    throw Error(ErrorCode::InvalidArgument, "more targets than free coefficients");
  }
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be positive");
  if (amplitude_bound && !(*amplitude_bound > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "amplitude bound must be positive");
  }
  if (!initial_guess.empty() && static_cast<int>(initial_guess.size()) != n_harmonics) {
    throw Error(ErrorCode::InvalidArgument, "initial guess must list A1..AN");
  }
}

namespace {

using Vec = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

constexpr int kInnerPanels = 16;
constexpr int kPolishPanels = 32;

// A1..AN = particular + basis z, satisfying the smoothness constraints exactly.
struct Reduction {
  double a0 = 0.0;
  Vec particular;
  MatX basis;
};

Reduction reduce(const DesignSpec& spec) {
  const int n = spec.n_harmonics;
  Reduction r;
  r.a0 = spec.phi0 / (2.0 * kPi);
  if (spec.smoothness == 0) {
    r.particular = Vec::Zero(n);
    r.basis = MatX::Identity(n, n);
    return r;
  }
  MatX c(spec.smoothness, n);
  Vec d(spec.smoothness);
  for (int j = 0; j < n; ++j) {
    c(0, j) = 1.0;
    if (spec.smoothness == 2) c(1, j) = static_cast<double>((j + 1) * (j + 1));
  }
  d(0) = -r.a0;
  if (spec.smoothness == 2) d(1) = 0.0;
  r.particular = c.completeOrthogonalDecomposition().solve(d);
  const Eigen::JacobiSVD<MatX> svd(c, Eigen::ComputeFullV);
  r.basis = svd.matrixV().rightCols(n - spec.smoothness);
  return r;
}

PulseShape shape_from(const Reduction& r, const Vec& z) {
  const Vec a = r.particular + r.basis * z;
  std::vector<double> coeffs;
  coeffs.reserve(a.size() + 1);
  coeffs.push_back(r.a0);
  for (Eigen::Index i = 0; i < a.size(); ++i) coeffs.push_back(a(i));
  return PulseShape::fourier(std::move(coeffs));
}

struct Problem {
  const DesignSpec& spec;
  Reduction red;

  Vec residuals(const Vec& z, int panels) const {
    const PulseShape s = shape_from(red, z);
    const ShapeCoefficients c = coefficients_on_grid(s, panels);
    Vec r(static_cast<Eigen::Index>(spec.targets.size()));
    for (std::size_t i = 0; i < spec.targets.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = coefficient_value(c, spec.targets[i].which) - spec.targets[i].value;
    }
    return r;
  }

  double penalty(const Vec& z) const {
    if (!spec.amplitude_bound) return 0.0;
    const PulseShape s = shape_from(red, z);
    double p = 0.0;
    constexpr int kSamples = 64;
    for (int i = 0; i <= kSamples / 2; ++i) {
      const double excess = std::abs(evaluate_waveform(s, static_cast<double>(i) / kSamples)) -
                            *spec.amplitude_bound;
      if (excess > 0.0) p += excess * excess;
    }
    return 1e-2 * p;
  }

  double objective(const Vec& z, int panels = kInnerPanels) const {
    return residuals(z, panels).squaredNorm() + penalty(z);
  }
};

Vec nelder_mead(const Problem& prob, Vec start, double step, int max_evals) {
  const Eigen::Index n = start.size();
  std::vector<Vec> pts(n + 1, start);
  std::vector<double> f(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += step;
  int evals = 0;
  for (Eigen::Index i = 0; i <= n; ++i) f[i] = prob.objective(pts[i]), ++evals;

  std::vector<Eigen::Index> order(n + 1);
  while (evals < max_evals) {
    for (Eigen::Index i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[n - 1];
    if (f[best] < 1e-24) break;
    double spread = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (spread < 1e-10) break;

    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const Vec xr = centroid + (centroid - pts[worst]);
    const double fr = prob.objective(xr);
    ++evals;
    if (fr < f[best]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = prob.objective(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = xe, f[worst] = fe;
      } else {
        pts[worst] = xr, f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second]) {
      pts[worst] = xr, f[worst] = fr;
      continue;
    }
    const bool outside = fr < f[worst];
    const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = prob.objective(xc);
    ++evals;
    if (fc < std::min(fr, f[worst])) {
      pts[worst] = xc, f[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      f[i] = prob.objective(pts[i]);
      ++evals;
    }
  }
  const auto it = std::min_element(f.begin(), f.end());
  return pts[static_cast<std::size_t>(it - f.begin())];
}

Vec gauss_newton(const Problem& prob, Vec z) {
  if (prob.spec.targets.empty()) return z;
  double fz = prob.objective(z, kPolishPanels);
  for (int iter = 0; iter < 30 && fz > 1e-28; ++iter) {
    const Vec r = prob.residuals(z, kPolishPanels);
    MatX j(r.size(), z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(z(k)));
      Vec zp = z, zm = z;
      zp(k) += h;
      zm(k) -= h;
      j.col(k) = (prob.residuals(zp, kPolishPanels) - prob.residuals(zm, kPolishPanels)) / (2.0 * h);
    }
    const Vec delta = j.completeOrthogonalDecomposition().solve(-r);
    bool improved = false;
    for (double lambda = 1.0; lambda > 1e-4; lambda *= 0.5) {
      const Vec trial = z + lambda * delta;
      const double ft = prob.objective(trial, kPolishPanels);
      if (ft < fz) {
        z = trial;
        fz = ft;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return z;
}

}  // namespace

DesignResult design(const DesignSpec& spec, std::uint64_t seed, int jobs) {
  spec.validate();
  const Problem prob{spec, reduce(spec)};
  const Eigen::Index dim = prob.red.basis.cols();

  if (spec.targets.empty() || dim == 0) {
    const PulseShape shape = shape_from(prob.red, Vec::Zero(dim)).with_name("designed");
    DesignResult out{shape, compute_coefficients(shape), 0.0, 0, 1};
    for (const auto& t : spec.targets) {
      out.residual = std::max(out.residual, std::abs(coefficient_value(out.coeffs, t.which) - t.value));
    }
    if (out.residual > spec.tolerance) throw Error(ErrorCode::NotConverged, "no free coefficients");
    return out;
  }

  struct Candidate {
    Vec z;
    double f = 0.0;
  };
  std::vector<Candidate> candidates(static_cast<std::size_t>(spec.restarts));
  parallel_for(candidates.size(), jobs, [&](std::size_t r) {
    Vec start(dim);
    if (r == 0 && !spec.initial_guess.empty()) {
      const Vec guess = Eigen::Map<const Vec>(spec.initial_guess.data(), spec.n_harmonics);
      start = prob.red.basis.transpose() * (guess - prob.red.particular);
    } else {
      std::mt19937_64 rng(derive_seed(seed, r));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index i = 0; i < dim; ++i) start(i) = normal(rng);
    }
    Vec z = nelder_mead(prob, start, 0.25, 400 * static_cast<int>(dim + 1));
    z = gauss_newton(prob, z);
    candidates[r] = {z, prob.objective(z, kPolishPanels)};
  });

  // Objectives this small are all exact solutions; treat them as ties so the
  // lowest restart index (a supplied initial guess, if any) is kept.
  const double exact = std::pow(1e-3 * spec.tolerance, 2);
  std::size_t best = 0;
  for (std::size_t r = 1; r < candidates.size(); ++r) {
    const double fb = std::max(candidates[best].f, exact);
    if (std::max(candidates[r].f, exact) < fb) best = r;
  }

  DesignResult out{shape_from(prob.red, candidates[best].z).with_name("designed"), {}, 0.0,
                   static_cast<int>(best), spec.restarts};
  out.coeffs = compute_coefficients(out.shape);
  for (const auto& t : spec.targets) {
    out.residual = std::max(out.residual, std::abs(coefficient_value(out.coeffs, t.which) - t.value));
  }
  if (out.residual > spec.tolerance) {
    throw Error(ErrorCode::NotConverged, "best residual " + std::to_string(out.residual) + " after " +
                                             std::to_string(spec.restarts) + " restarts");
  }
  return out;
}

std::optional<DesignSpec> designed_preset(std::string_view name) {
  DesignSpec s;
  s.phi0 = kPi;
  if (name == "W11_design") {
    s.n_harmonics = 7;
    s.smoothness = 1;
    s.targets = parse_targets("u,u2");
    // The tabulated W11(pi) row with its unreadable A5 set to zero.
    s.initial_guess = {-1.242022, -1.009075, 0.700828, 0.530624, 0.0, 0.277982, 0.241663};
    return s;
  }
  if (name == "S_design") {
    s.n_harmonics = 5;
    s.smoothness = 1;
    s.targets = parse_targets("u");
    return s;
  }
  if (name == "F_design") {
    s.n_harmonics = 5;
    s.smoothness = 0;
    s.targets = parse_targets("u2=1/3");
    s.initial_guess = {-1.419474, -2.048028, 1.549555, 1.435813, -0.017867};
    return s;
  }
  return std::nullopt;
}

std::vector<std::string> designed_preset_names() { return {"W11_design", "S_design", "F_design"}; }

const DesignResult& designed_shape(std::string_view name, std::uint64_t seed) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, std::uint64_t>, DesignResult> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(std::string(name), seed);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const auto spec = designed_preset(name);
  if (!spec) throw Error(ErrorCode::UnknownShape, "no designed preset '" + std::string(name) + "'");
  DesignResult r = design(*spec, seed);
  r.shape = r.shape.with_name(std::string(name));
  return cache.emplace(key, std::move(r)).first->second;
}

}  // namespace softdd
