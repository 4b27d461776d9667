#include "mabuchi/potential.hpp"

#include <sstream>

namespace mabuchi {

double guillemin_value(const MomentPolytope& p, const Vec& x) {
  double s = 0.0;
  for (const auto& f : p.facets()) {
    const double l = f.value(x);
    if (l > 0) s += 0.5 * l * std::log(l);
  }
  return s;
}

double min_eigenvalue(const Mat& m) {
  if (m.rows() == 1) return m(0, 0);
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double half = 0.5 * (a - c);
  return 0.5 * (a + c) - std::sqrt(half * half + b * b);
}

namespace {

void accumulate(AdmissibilityReport& r, const Mat& hess, const Vec& x) {
  const double lam = min_eigenvalue(hess);
  ++r.checked_points;
  if (!(lam > 0)) r.admissible = false;
  if (lam < r.min_eigenvalue || r.argmin.size() == 0) {
    r.min_eigenvalue = lam;
    r.argmin = x;
  }
}

Mat hessian_at(const MomentPolytope& p, const Poly& v, bool reference, const Vec& x) {
  Mat hs = v.jet(x, 2).hess;
  if (reference) hs += guillemin_jet<double>(p, x, 2).hess;
  return hs;
}

}  // namespace

AdmissibilityReport assess_admissibility(const Discretization& d, const Poly& v, bool reference) {
  AdmissibilityReport r;
  for (const auto& x : d.grid().nodes) accumulate(r, hessian_at(d.polytope(), v, reference, x), x);
  for (const auto& x : d.grid().points) accumulate(r, hessian_at(d.polytope(), v, reference, x), x);
  return r;
}

SymplecticPotential::SymplecticPotential(DiscretizationPtr disc, Poly smooth, bool reference)
    : disc_(std::move(disc)), smooth_(std::move(smooth)), reference_(reference) {
  if (!disc_) throw Error(ErrorKind::InvalidArgument, "potential without discretization");
  if (smooth_.dim() != disc_->dimension())
    throw Error(ErrorKind::InvalidArgument, "smooth part dimension differs from the polytope");
  const auto& g = disc_->grid();
  for (const auto& x : g.nodes) accumulate(report_, hessian_at(polytope(), smooth_, reference_, x), x);
  hessians_.reserve(g.size());
  for (const auto& x : g.points) {
    hessians_.push_back(hessian_at(polytope(), smooth_, reference_, x));
    accumulate(report_, hessians_.back(), x);
  }
  if (!report_.admissible) {
    std::ostringstream os;
    os << "Hessian not positive definite; smallest eigenvalue " << report_.min_eigenvalue << " at (";
    for (int i = 0; i < report_.argmin.size(); ++i) os << (i ? ", " : "") << report_.argmin(i);
    os << ")";
    throw Error(ErrorKind::NotAdmissible, os.str());
  }
}

double SymplecticPotential::value(const Vec& x) const {
  double v = smooth_(x);
  if (reference_) v += guillemin_value(polytope(), x);
  return v;
}

Jet<double> SymplecticPotential::jet(const Vec& x, int order) const {
  Jet<double> j = smooth_.jet(x, order);
  if (reference_) j += guillemin_jet<double>(polytope(), x, order);
  return j;
}

std::vector<double> SymplecticPotential::sample() const {
  const auto& pts = disc_->grid().points;
  std::vector<double> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) out[k] = value(pts[k]);
  return out;
}

SymplecticPotential guillemin_potential(DiscretizationPtr disc) {
  const int n = disc->dimension();
  return SymplecticPotential(std::move(disc), Poly(n, 0), true);
}

SymplecticPotential make_potential(const SymplecticPotential& base, const Poly& v) {
  return SymplecticPotential(base.discretization(), base.smooth() + v, base.has_reference());
}

SymplecticPotential add_affine(const SymplecticPotential& u, const AffineField& f) {
  return make_potential(u, f.as_polynomial());
}

AdmissibilityReport check_admissible(const SymplecticPotential& u) { return u.admissibility(); }

double default_s_max(const SymplecticPotential& u) {
  const auto& g = u.disc().grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    if (g.near_boundary[k]) continue;
    s = std::max(s, u.gradient(g.nodes[k]).cwiseAbs().maxCoeff());
  }
  return s;
}

void require_same_space(const SymplecticPotential& a, const SymplecticPotential& b, const char* where) {
  if (!a.same_space(b))
    throw Error(ErrorKind::PolytopeMismatch, std::string(where) + ": potentials live on different polytopes or grids");
}

Poly bubble(const MomentPolytope& p) {
  const int n = p.dimension();
  Poly out = Poly::constant(n, 1.0);
  for (const auto& f : p.facets()) out = out * Poly::affine(f.normal_real(), -f.offset);
  return out;
}

}  // namespace mabuchi
