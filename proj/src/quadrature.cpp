#include "softdd/quadrature.hpp"

#include "softdd/core.hpp"

#include <cmath>
#include <map>

namespace softdd {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw Error(ErrorCode::InvalidArgument, "Gauss rule order out of range");
  thread_local std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

PanelGrid composite_gauss(double a, double b, int panels, int order) {
  if (panels < 1) throw Error(ErrorCode::InvalidArgument, "need at least one panel");
  const GaussRule& rule = gauss_legendre(order);
  PanelGrid grid;
  grid.a = a;
  grid.b = b;
  grid.panels = panels;
  grid.order = order;
  grid.nodes.reserve(static_cast<std::size_t>(panels) * order);
  grid.weights.reserve(grid.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int k = 0; k < order; ++k) {
      grid.nodes.push_back(mid + 0.5 * h * rule.nodes[k]);
      grid.weights.push_back(0.5 * h * rule.weights[k]);
    }
  }
  return grid;
}

}  // namespace softdd
