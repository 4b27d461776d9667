#include "mabuchi/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "mabuchi/quadrature.hpp"

namespace mabuchi {

double CurvatureField::sup_deviation() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double scalar_curvature_at(const SymplecticPotential& u, const Vec& x) {
  return scalar_curvature_from_jet(u.jet(x, 4));
}

CurvatureField scalar_curvature(const SymplecticPotential& u) {
  const auto& pts = u.disc().grid().points;
  CurvatureField c;
  c.S_bar = u.polytope().average_scalar_curvature();
  c.S.resize(pts.size());
  c.residual.resize(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    c.S[k] = scalar_curvature_at(u, pts[k]);
    c.residual[k] = c.S[k] - c.S_bar;
  }
  return c;
}

double calabi_energy(const Discretization& d, const CurvatureField& c) {
  const auto& w = d.grid().weights;
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * c.residual[k] * c.residual[k];
  return s;
}

double calabi_energy(const SymplecticPotential& u) { return calabi_energy(u.disc(), scalar_curvature(u)); }

PotentialPath::PotentialPath(DiscretizationPtr disc, bool reference, std::vector<Poly> coefficients,
                             std::vector<double> times)
    : disc_(std::move(disc)), reference_(reference), coeffs_(std::move(coefficients)), times_(std::move(times)) {
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidArgument, "path needs at least one coefficient");
  if (times_.empty()) throw Error(ErrorKind::InvalidArgument, "path needs at least one sample");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw Error(ErrorKind::InvalidArgument, "path times must increase strictly");
  samples_.reserve(times_.size());
  for (double t : times_) samples_.push_back(at(t));
}

Poly PotentialPath::smooth_at(double t) const {
  Poly out = coeffs_.back();
  for (int m = static_cast<int>(coeffs_.size()) - 2; m >= 0; --m) out = out * t + coeffs_[m];
  return out;
}

SymplecticPotential PotentialPath::at(double t) const { return SymplecticPotential(disc_, smooth_at(t), reference_); }

Poly PotentialPath::velocity(double t) const {
  const int n = disc_->dimension();
  Poly out(n, 0);
  double tp = 1.0;
  for (std::size_t m = 1; m < coeffs_.size(); ++m) {
    out += coeffs_[m] * (static_cast<double>(m) * tp);
    tp *= t;
  }
  return out;
}

namespace {

std::vector<double> uniform_times(double a, double b, int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = a + (b - a) * k / (n - 1);
  t.back() = b;
  return t;
}

}  // namespace

PotentialPath PotentialPath::constant(const SymplecticPotential& u, std::vector<double> times) {
  return PotentialPath(u.discretization(), u.has_reference(), {u.smooth()}, std::move(times));
}

PotentialPath PotentialPath::linear(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples) {
  require_same_space(u0, u1, "linear path");
  return PotentialPath(u0.discretization(), u0.has_reference(), {u0.smooth(), u1.smooth() - u0.smooth()},
                       uniform_times(0.0, 1.0, n_samples));
}

PotentialPath PotentialPath::reparametrized(const SymplecticPotential& u0, const SymplecticPotential& u1,
                                            const std::vector<double>& tau, int n_samples) {
  require_same_space(u0, u1, "reparametrized path");
  const Poly diff = u1.smooth() - u0.smooth();
  std::vector<Poly> c;
  for (std::size_t m = 0; m < tau.size(); ++m) c.push_back(diff * tau[m]);
  if (c.empty()) c.emplace_back(u0.dimension(), 0);
  c[0] += u0.smooth();
  return PotentialPath(u0.discretization(), u0.has_reference(), std::move(c), uniform_times(0.0, 1.0, n_samples));
}

PotentialPath PotentialPath::bent(const SymplecticPotential& u0, const SymplecticPotential& u1, const Poly& b,
                                  int n_samples) {
  require_same_space(u0, u1, "bent path");
  return PotentialPath(u0.discretization(), u0.has_reference(), {u0.smooth(), u1.smooth() - u0.smooth() + b, -b},
                       uniform_times(0.0, 1.0, n_samples));
}

PotentialPath PotentialPath::ray(const SymplecticPotential& u0, const Poly& w, double T, int n_samples) {
  if (!(T > 0)) throw Error(ErrorKind::InvalidArgument, "ray length must be positive");
  return PotentialPath(u0.discretization(), u0.has_reference(), {u0.smooth(), w}, uniform_times(0.0, T, n_samples));
}

IFunctionalResult i_functional(const PotentialPath& path) {
  const Discretization& d = path.disc();
  const Poly start = path.smooth_at(path.t_begin());
  IFunctionalResult r;
  for (double t : path.times()) {
    const Poly diff = path.smooth_at(t) - start;
    const Poly vel = path.velocity(t);
    r.times.push_back(t);
    r.values.push_back(-integrate_interior(d, [&](const Vec& x) { return diff(x); }));
    r.rates.push_back(-integrate_interior(d, [&](const Vec& x) { return vel(x); }));
  }
  r.endpoint_value = r.values.back();
  return r;
}

double j_functional(const SymplecticPotential& u, const SymplecticPotential& base) {
  require_same_space(u, base, "j_functional");
  const auto& g = u.disc().grid();
  double term_base = 0.0, term_u = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec& x = g.points[k];
    const Vec sb = base.gradient(x);
    const Vec su = u.gradient(x);
    const double psi_b_at_sb = sb.dot(x) - base.value(x);
    const double psi_u_at_su = su.dot(x) - u.value(x);
    const double psi_u_at_sb = legendre_at(u, sb, &x).value;
    const double psi_b_at_su = legendre_at(base, su, &x).value;
    term_base += g.weights[k] * (psi_u_at_sb - psi_b_at_sb);
    term_u += g.weights[k] * (psi_u_at_su - psi_b_at_su);
  }
  return term_base - term_u;
}

double k_energy_rate(const Discretization& d, const CurvatureField& c, const Poly& u_dot) {
  const auto& g = d.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g.weights[k] * u_dot(g.points[k]) * c.residual[k];
  return s;
}

double k_energy_rate(const SymplecticPotential& u, const Poly& u_dot) {
  return k_energy_rate(u.disc(), scalar_curvature(u), u_dot);
}

double k_energy_rate(const PotentialPath& path, double t) { return k_energy_rate(path.at(t), path.velocity(t)); }

double k_energy_delta(const PotentialPath& path, int time_nodes) {
  if (path.coefficients().size() == 1) return 0.0;
  auto [ts, ws] = gauss_legendre(time_nodes, path.t_begin(), path.t_end());
  double s = 0.0;
  for (int i = 0; i < time_nodes; ++i) s += ws[i] * k_energy_rate(path, ts[i]);
  return s;
}

double entropy(const SymplecticPotential& u, const SymplecticPotential& base) {
  require_same_space(u, base, "entropy");
  const auto& g = u.disc().grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec& x = g.points[k];
    const Jet<double> ju = u.jet(x, 2);
    // y with grad base(y) = grad u(x): both points map to the same s.
    const Vec y = legendre_at(base, ju.grad, &x).x;
    const double log_ratio = std::log(base.hessian(y).determinant()) - std::log(ju.hess.determinant());
    s += g.weights[k] * log_ratio;
  }
  return s;
}

PathLength path_length(const PotentialPath& path, int time_nodes) {
  const Discretization& d = path.disc();
  auto speed = [&](double t) {
    const Poly v = path.velocity(t);
    return std::sqrt(integrate_interior(d, [&](const Vec& x) { return v(x) * v(x); }));
  };
  PathLength r;
  for (double t : path.times()) r.speeds.push_back(speed(t));
  if (path.coefficients().size() > 1) {
    auto [ts, ws] = gauss_legendre(time_nodes, path.t_begin(), path.t_end());
    for (int i = 0; i < time_nodes; ++i) r.length += ws[i] * speed(ts[i]);
  }
  return r;
}

double geodesic_distance(const SymplecticPotential& u0, const SymplecticPotential& u1) {
  require_same_space(u0, u1, "geodesic_distance");
  const Poly diff = u1.smooth() - u0.smooth();
  return std::sqrt(integrate_interior(u0.disc(), [&](const Vec& x) {
    const double v = diff(x);
    return v * v;
  }));
}

DistanceBound distance_lower_bound(const SymplecticPotential& u, const SymplecticPotential& base) {
  require_same_space(u, base, "distance_lower_bound");
  const Discretization& d = u.disc();
  const Poly diff = u.smooth() - base.smooth();
  const double shift = integrate_interior(d, [&](const Vec& x) { return diff(x); }) / d.polytope().volume();
  const SymplecticPotential un = make_potential(u, Poly::constant(u.dimension(), -shift));

  DistanceBound r;
  r.distance = geodesic_distance(base, un);
  const auto& g = d.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec& x = g.points[k];
    // phi = psi_u - psi_base at s = grad base(x) (for omega^n) and s = grad u(x).
    const Vec sb = base.gradient(x);
    const double phi_b = legendre_at(un, sb, &x).value - (sb.dot(x) - base.value(x));
    const Vec su = un.gradient(x);
    const double phi_u = (su.dot(x) - un.value(x)) - legendre_at(base, su, &x).value;
    r.negative_part += g.weights[k] * std::max(0.0, -phi_b);
    r.positive_part += g.weights[k] * std::max(0.0, phi_u);
  }
  return r;
}

}  // namespace mabuchi
