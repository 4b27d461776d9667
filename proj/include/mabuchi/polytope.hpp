#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mabuchi/errors.hpp"
#include "mabuchi/types.hpp"

namespace mabuchi {

/// Half-space {x : <normal, x> >= offset} with a primitive integer normal.
struct Facet {
  Eigen::VectorXi normal;
  double offset = 0.0;

  Vec normal_real() const { return normal.cast<double>(); }
  double value(const Vec& x) const { return normal_real().dot(x) - offset; }
};

/// Delzant polytope in dimension 1 or 2. Immutable after construction.
class MomentPolytope {
 public:
  MomentPolytope(std::string name, std::vector<Facet> facets);

  const std::string& name() const { return name_; }
  int dimension() const { return dim_; }
  const std::vector<Facet>& facets() const { return facets_; }
  int facet_count() const { return static_cast<int>(facets_.size()); }

  /// Vertices in counterclockwise order for n = 2, ascending for n = 1.
  const std::vector<Vec>& vertices() const { return vertices_; }

  /// Endpoints of each facet (n = 2), in the polytope's ccw orientation.
  const std::vector<std::pair<Vec, Vec>>& edges() const { return edges_; }

  /// Indices of the facets tight at each vertex.
  const std::vector<std::vector<int>>& vertex_facets() const { return vertex_facets_; }

  double volume() const { return volume_; }
  /// Sum of lattice lengths of the facets (vertex count for n = 1).
  double boundary_volume() const { return boundary_volume_; }
  /// 2 Vol(dP) / Vol(P): the average scalar curvature of the class.
  double average_scalar_curvature() const { return 2.0 * boundary_volume_ / volume_; }
  Vec centroid() const { return centroid_; }

  Eigen::VectorXd facet_values(const Vec& x) const;
  double min_facet_value(const Vec& x) const;
  /// Euclidean distance to the boundary (positive inside).
  double boundary_distance(const Vec& x) const;
  bool contains(const Vec& x, double tol = 0.0) const;

  Vec lower() const { return lower_; }
  Vec upper() const { return upper_; }

  bool same_as(const MomentPolytope& other) const;

 private:
  void validate_1d();
  void validate_2d();
  void compute_measures();

  std::string name_;
  int dim_ = 0;
  std::vector<Facet> facets_;
  std::vector<Vec> vertices_;
  std::vector<std::pair<Vec, Vec>> edges_;
  std::vector<std::vector<int>> vertex_facets_;
  double volume_ = 0.0;
  double boundary_volume_ = 0.0;
  Vec centroid_;
  Vec lower_, upper_;
};

/// Named models: "P1" (segment, CP^1), "P2" (simplex, CP^2), "PF1" (trapezoid,
/// first Hirzebruch surface).
MomentPolytope make_polytope(const std::string& name);

/// User-supplied facet list; validated for boundedness and the Delzant condition.
MomentPolytope make_polytope(const std::string& name, const std::vector<Facet>& facets);

/// Image of P under x -> A x + b with A integral and unimodular.
MomentPolytope transformed(const MomentPolytope& p, const Eigen::Matrix2i& A, const Eigen::Vector2i& b);

}  // namespace mabuchi
