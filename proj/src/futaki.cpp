#include "mabuchi/futaki.hpp"

#include <cmath>

namespace mabuchi {

namespace {

Vec quadrature_centroid(const Discretization& d) {
  const int n = d.dimension();
  Vec m = Vec::Zero(n);
  double vol = 0.0;
  const auto& g = d.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    m += g.weights[k] * g.points[k];
    vol += g.weights[k];
  }
  return m / vol;
}

}  // namespace

AffineField normalize(const AffineField& f, const Discretization& d) {
  return {f.a, -f.a.dot(quadrature_centroid(d))};
}

HolomorphyPotential theta_of_affine(const AffineField& f, const SymplecticPotential& u) {
  HolomorphyPotential h;
  h.theta = normalize(f, u.disc());
  h.constant = f.b - h.theta.b;
  return h;
}

double futaki_invariant(const AffineField& f, const Discretization& d, const CurvatureField& c) {
  const AffineField theta = normalize(f, d);
  const auto& g = d.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s -= g.weights[k] * theta(g.points[k]) * c.residual[k];
  return s;
}

double futaki_invariant(const AffineField& f, const SymplecticPotential& u) {
  return futaki_invariant(f, u.disc(), scalar_curvature(u));
}

double futaki_boundary_value(const AffineField& f, const Discretization& d) {
  const double interior = integrate_interior(d, [&](const Vec& x) { return f(x); });
  const double boundary = integrate_boundary(d, [&](const Vec& x) { return f(x); });
  return d.polytope().average_scalar_curvature() * interior - 2.0 * boundary;
}

double fm_inner(const AffineField& f, const AffineField& g, const SymplecticPotential& u) {
  const AffineField tf = normalize(f, u.disc()), tg = normalize(g, u.disc());
  return integrate_interior(u.disc(), [&](const Vec& x) { return tf(x) * tg(x); });
}

namespace {

AffineField basis_field(const Discretization& d, int i) {
  Vec a = Vec::Zero(d.dimension());
  a(i) = 1.0;
  return normalize(AffineField(a, 0.0), d);
}

ExtremalField solve_riesz(const Discretization& d, const Eigen::VectorXd& values) {
  ExtremalField xc;
  xc.gram = fm_gram(d);
  xc.futaki_values = values;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xc.gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-14)
    throw Error(ErrorKind::SingularGram, "Futaki-Mabuchi Gram matrix is not positive definite");
  xc.coefficients = ldlt.solve(values);
  const int n = d.dimension();
  Vec a(n);
  for (int i = 0; i < n; ++i) a(i) = xc.coefficients(i);
  xc.theta = normalize(AffineField(a, 0.0), d);
  xc.futaki_value = xc.coefficients.dot(xc.gram * xc.coefficients);
  return xc;
}

}  // namespace

Eigen::MatrixXd fm_gram(const Discretization& d) {
  const int n = d.dimension();
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const AffineField fi = basis_field(d, i), fj = basis_field(d, j);
      G(i, j) = G(j, i) = integrate_interior(d, [&](const Vec& x) { return fi(x) * fj(x); });
    }
  return G;
}

ExtremalField extremal_field(const Discretization& d) {
  const int n = d.dimension();
  Eigen::VectorXd values(n);
  for (int i = 0; i < n; ++i) values(i) = futaki_boundary_value(basis_field(d, i), d);
  return solve_riesz(d, values);
}

ExtremalField extremal_field(const SymplecticPotential& u) {
  const CurvatureField c = scalar_curvature(u);
  const int n = u.dimension();
  Eigen::VectorXd values(n);
  for (int i = 0; i < n; ++i) values(i) = futaki_invariant(basis_field(u.disc(), i), u.disc(), c);
  return solve_riesz(u.disc(), values);
}

HwangReport hwang_bound(const SymplecticPotential& u, const CurvatureField& c, const ExtremalField& xc) {
  const Discretization& d = u.disc();
  const int n = d.dimension();
  const auto& g = d.grid();
  HwangReport r;
  r.calabi = calabi_energy(d, c);
  r.futaki_extremal = xc.futaki_value;

  // Normal equations of the weighted least-squares fit of S_bar - S.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<AffineField> basis;
  for (int i = 0; i < n; ++i) basis.push_back(basis_field(d, i));
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int i = 0; i < n; ++i) rhs(i) -= g.weights[k] * basis[i](g.points[k]) * c.residual[k];
  r.projection = xc.gram.ldlt().solve(rhs);

  for (std::size_t k = 0; k < g.size(); ++k) {
    double rho = 0.0;
    for (int i = 0; i < n; ++i) rho += r.projection(i) * basis[i](g.points[k]);
    const double target = -c.residual[k];
    r.rho_sq += g.weights[k] * rho * rho;
    r.rho_perp_sq += g.weights[k] * (target - rho) * (target - rho);
    r.rho_dot_residual += g.weights[k] * rho * target;
  }
  r.cauchy_schwarz = r.rho_sq > 0 ? r.rho_dot_residual * r.rho_dot_residual / r.rho_sq : 0.0;
  r.decomposition_error = std::abs(r.calabi - r.rho_sq - r.rho_perp_sq);
  return r;
}

HwangReport hwang_bound(const SymplecticPotential& u) {
  return hwang_bound(u, scalar_curvature(u), extremal_field(u.disc()));
}

}  // namespace mabuchi
