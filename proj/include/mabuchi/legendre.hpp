#pragma once

#include <utility>
#include <vector>

#include "mabuchi/potential.hpp"

namespace mabuchi {

/// Maximizer x(s) of <s, x> - u(x) over P and the value psi(s).
struct LegendrePoint {
  Vec x;
  double value = 0.0;
  int iterations = 0;
};

/// Damped Newton on u(y) - <s, y> with a fraction-to-boundary rule. The
/// maximizer is interior whenever u carries the Guillemin reference.
LegendrePoint legendre_at(const SymplecticPotential& u, const Vec& s, const Vec* start = nullptr);

/// Kahler-side potential psi on the box [-S_max, S_max]^n, node-major with the
/// first coordinate fastest.
struct KahlerSidePotential {
  int dim = 0;
  double s_max = 0.0;
  int cells = 0;
  std::vector<Vec> nodes;
  std::vector<double> values;
  std::vector<Vec> maximizers;  // grad psi at each node
  std::vector<std::pair<Vec, double>> vertex_asymptotics;  // (vertex v, u(v)): psi ~ <s, v> - u(v)

  double spacing() const { return 2.0 * s_max / cells; }
  int per_axis() const { return cells + 1; }
  std::size_t size() const { return nodes.size(); }

  /// Second differences along every axis (and the 2x2 minors for n = 2)
  /// are nonnegative up to tol.
  bool convex(double tol = 1e-12) const;
  /// Every node gradient lies in the closed polytope.
  bool gradients_in(const MomentPolytope& p, double tol = 1e-12) const;
};

int default_dual_cells(int dim);

/// Throws TruncationTooSmall when some lattice node at distance >= h from the
/// boundary has a gradient outside the box.
KahlerSidePotential legendre_dual(const SymplecticPotential& u, double s_max, int cells = 0);

/// Brute-force conjugate of the gridded psi: max over nodes of <s, x> - psi(s).
double discrete_legendre(const KahlerSidePotential& psi, const Vec& x);

/// Sup over the interior lattice nodes (distance >= h) of |psi** - u|.
double involution_error(const SymplecticPotential& u, const KahlerSidePotential& psi);

}  // namespace mabuchi
