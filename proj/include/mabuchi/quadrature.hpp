#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "mabuchi/polytope.hpp"
#include "mabuchi/types.hpp"

namespace mabuchi {

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q);

/// Gauss-Legendre nodes and weights mapped to [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q, double a, double b);

/// Quadrature over P built on the uniform grid of spacing h, plus the lattice
/// nodes kh strictly inside P used for pointwise checks.
struct InteriorGrid {
  double h = 0.0;
  int order = 0;
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<Vec> nodes;
  std::vector<char> near_boundary;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// Lattice boundary measure: Euclidean length scaled by 1/|normal| on each
/// facet; counting measure for n = 1.
struct BoundaryMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<int> facet;

  std::size_t size() const { return points.size(); }
  double facet_total(int i) const;
};

struct GridOptions {
  double h = 0.0;  // 0 selects the default for the dimension
  int order = 0;   // Gauss points per cell and axis; 0 selects the default
};

double default_spacing(int dim);

/// A polytope together with its interior and boundary quadrature. Shared by
/// every potential living on it; immutable.
class Discretization {
 public:
  Discretization(MomentPolytope polytope, GridOptions options = {});

  const MomentPolytope& polytope() const { return polytope_; }
  const InteriorGrid& grid() const { return grid_; }
  const BoundaryMeasure& boundary() const { return boundary_; }
  int dimension() const { return polytope_.dimension(); }
  double h() const { return grid_.h; }

  /// Same polytope and same grid parameters.
  bool compatible(const Discretization& other) const;

 private:
  MomentPolytope polytope_;
  InteriorGrid grid_;
  BoundaryMeasure boundary_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(const MomentPolytope& p, GridOptions options = {});
DiscretizationPtr make_discretization(const std::string& name, GridOptions options = {});

InteriorGrid build_interior_grid(const MomentPolytope& p, double h, int order);
BoundaryMeasure build_boundary_measure(const MomentPolytope& p, double h, int order);

/// Quadrature of sampled values; throws GridMismatch on a size mismatch.
double integrate_interior(const MomentPolytope& p, const InteriorGrid& grid, const std::vector<double>& f);
double integrate_boundary(const MomentPolytope& p, const BoundaryMeasure& bm, const std::vector<double>& f);

template <typename F>
double integrate_interior(const Discretization& d, F&& f) {
  const auto& g = d.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) sum += g.weights[k] * f(g.points[k]);
  return sum;
}

template <typename F>
double integrate_boundary(const Discretization& d, F&& f) {
  const auto& b = d.boundary();
  double sum = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) sum += b.weights[k] * f(b.points[k]);
  return sum;
}

/// Weighted sum of values already sampled at the interior quadrature points.
double integrate_samples(const Discretization& d, const std::vector<double>& f);

}  // namespace mabuchi
