#pragma once

#include <vector>

namespace softdd {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule. Nodes are computed by Newton iteration on
/// P_n and cached per thread; n must be between 1 and 64.
const GaussRule& gauss_legendre(int n);

/// Composite Gauss rule over [a, b] split into `panels` equal panels.
struct PanelGrid {
  double a = 0.0;
  double b = 1.0;
  int panels = 0;
  int order = 0;
  std::vector<double> nodes;    // panel-major, order nodes per panel
  std::vector<double> weights;

  double panel_width() const { return (b - a) / panels; }
  double edge(int p) const { return a + p * panel_width(); }
};

PanelGrid composite_gauss(double a, double b, int panels, int order = 8);

}  // namespace softdd
