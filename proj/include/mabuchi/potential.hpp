#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mabuchi/errors.hpp"
#include "mabuchi/polynomial.hpp"
#include "mabuchi/polytope.hpp"
#include "mabuchi/quadrature.hpp"
#include "mabuchi/types.hpp"

namespace mabuchi {

/// Jet of the Guillemin potential 1/2 sum l_i log l_i at an interior point.
template <typename Scalar>
Jet<Scalar> guillemin_jet(const MomentPolytope& p, const VectorN<Scalar>& x, int order = 4) {
  const int n = p.dimension();
  Jet<Scalar> j(n, order);
  for (const auto& f : p.facets()) {
    const VectorN<Scalar> nu = f.normal.cast<Scalar>();
    const Scalar l = nu.dot(x) - Scalar(f.offset);
    const Scalar logl = std::log(l);
    j.value += Scalar(0.5) * l * logl;
    if (order < 1) continue;
    j.grad += Scalar(0.5) * (logl + Scalar(1)) * nu;
    if (order < 2) continue;
    const MatrixN<Scalar> nn = nu * nu.transpose();
    j.hess += (Scalar(0.5) / l) * nn;
    if (order < 3) continue;
    for (int k = 0; k < n; ++k) {
      j.third[k] -= (Scalar(0.5) * nu(k) / (l * l)) * nn;
      if (order < 4) continue;
      for (int m = 0; m < n; ++m) j.fourth[k][m] += (nu(k) * nu(m) / (l * l * l)) * nn;
    }
  }
  return j;
}

/// Guillemin potential value, continuous up to the boundary (l log l -> 0).
double guillemin_value(const MomentPolytope& p, const Vec& x);

/// Smallest eigenvalue of a symmetric matrix of size <= 2.
double min_eigenvalue(const Mat& m);

struct AdmissibilityReport {
  bool admissible = true;
  double min_eigenvalue = INFINITY;
  Vec argmin;
  std::size_t checked_points = 0;
};

/// Affine function <a, x> + b on the polytope: the potential of a torus field.
struct AffineField {
  Vec a;
  double b = 0.0;

  AffineField() = default;
  AffineField(Vec a_, double b_) : a(std::move(a_)), b(b_) {}

  double operator()(const Vec& x) const { return a.dot(x) + b; }
  Poly as_polynomial() const { return Poly::affine(a, b); }
  /// Shifted so that its integral over P vanishes.
  AffineField normalized(const MomentPolytope& p) const { return {a, -a.dot(p.centroid())}; }
  double mean(const MomentPolytope& p) const { return (*this)(p.centroid()); }
  AffineField operator-() const { return {-a, -b}; }
  AffineField scaled(double s) const { return {s * a, s * b}; }
};

/// u = u_ref + v with u_ref the Guillemin potential (when the reference flag is
/// set) and v a polynomial. Admissibility is verified at construction on the
/// lattice nodes and the quadrature points; Hessians at the quadrature points
/// are cached.
class SymplecticPotential {
 public:
  SymplecticPotential(DiscretizationPtr disc, Poly smooth, bool reference = true);

  const DiscretizationPtr& discretization() const { return disc_; }
  const Discretization& disc() const { return *disc_; }
  const MomentPolytope& polytope() const { return disc_->polytope(); }
  int dimension() const { return disc_->dimension(); }
  bool has_reference() const { return reference_; }
  const Poly& smooth() const { return smooth_; }

  double value(const Vec& x) const;
  Jet<double> jet(const Vec& x, int order = 4) const;
  Vec gradient(const Vec& x) const { return jet(x, 1).grad; }
  Mat hessian(const Vec& x) const { return jet(x, 2).hess; }

  const std::vector<Mat>& hessians() const { return hessians_; }
  const AdmissibilityReport& admissibility() const { return report_; }

  /// Values at the interior quadrature points.
  std::vector<double> sample() const;

  bool same_space(const SymplecticPotential& other) const {
    return reference_ == other.reference_ && disc_->compatible(*other.disc_);
  }

 private:
  DiscretizationPtr disc_;
  Poly smooth_;
  bool reference_ = true;
  std::vector<Mat> hessians_;
  AdmissibilityReport report_;
};

/// Evaluates admissibility of u_ref + v without constructing a potential.
AdmissibilityReport assess_admissibility(const Discretization& d, const Poly& v, bool reference);

SymplecticPotential guillemin_potential(DiscretizationPtr disc);

/// base + v; throws NotAdmissible with the worst node and its eigenvalue.
SymplecticPotential make_potential(const SymplecticPotential& base, const Poly& v);

SymplecticPotential add_affine(const SymplecticPotential& u, const AffineField& f);

AdmissibilityReport check_admissible(const SymplecticPotential& u);

/// Truncation radius: the largest |grad u|_inf over lattice nodes at distance
/// >= h from the boundary.
double default_s_max(const SymplecticPotential& u);

/// Throws PolytopeMismatch unless both potentials share a discretization.
void require_same_space(const SymplecticPotential& a, const SymplecticPotential& b, const char* where);

/// The polynomial x(1-x) (n = 1) or the product of facet functions (n = 2).
Poly bubble(const MomentPolytope& p);

}  // namespace mabuchi
