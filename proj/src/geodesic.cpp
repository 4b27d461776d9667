#include "mabuchi/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mabuchi/legendre.hpp"
#include "mabuchi/strip_solver.hpp"

namespace mabuchi {

GeodesicSegment exact_geodesic(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples) {
  require_same_space(u0, u1, "exact_geodesic");
  if (n_samples < 2) throw Error(ErrorKind::InvalidArgument, "a segment needs at least 2 samples");
  GeodesicSegment seg{PotentialPath::linear(u0, u1, n_samples), 0.0, 0.0, {}};
  seg.speed = geodesic_distance(u0, u1);
  PathLength pl = path_length(seg.path);
  seg.length = pl.length;
  seg.speeds = std::move(pl.speeds);
  return seg;
}

namespace {

std::vector<Vec> box_points(int n, double s_max, int per_axis) {
  std::vector<Vec> pts;
  const double step = per_axis > 1 ? 2 * s_max / (per_axis - 1) : 0.0;
  for (int j = 0; j < (n == 1 ? 1 : per_axis); ++j)
    for (int i = 0; i < per_axis; ++i)
      pts.push_back(n == 1 ? make_vec(-s_max + i * step) : make_vec(-s_max + i * step, -s_max + j * step));
  return pts;
}

struct ResidualSetup {
  double h = 0, s_max = 0;
  std::vector<Vec> points;
};

ResidualSetup residual_setup(const SymplecticPotential& u0, const SymplecticPotential& u1, const ResidualOptions& o) {
  const int n = u0.dimension();
  ResidualSetup r;
  r.h = o.step > 0 ? o.step : u0.disc().grid().h;
  r.s_max = o.s_max > 0 ? o.s_max : 0.8 * std::min(default_s_max(u0), default_s_max(u1));
  r.points = box_points(n, r.s_max, o.points > 0 ? o.points : (n == 1 ? 33 : 9));
  return r;
}

// psi(k, s) is the Kahler-side potential at time t + k h, k in {-1, 0, 1}.
template <typename Psi>
double residual_at(Psi&& psi, const Vec& s, double h) {
  const int n = static_cast<int>(s.size());
  auto e = [&](int a) {
    Vec v = Vec::Zero(n);
    v(a) = h;
    return v;
  };
  const double c = psi(0, s);
  const double tt = (psi(1, s) - 2 * c + psi(-1, s)) / (h * h);
  Vec ts(n);
  Mat ss(n, n);
  for (int a = 0; a < n; ++a) {
    const Vec ea = e(a);
    ts(a) = (psi(1, s + ea) - psi(1, s - ea) - psi(-1, s + ea) + psi(-1, s - ea)) / (4 * h * h);
    ss(a, a) = (psi(0, s + ea) - 2 * c + psi(0, s - ea)) / (h * h);
    for (int b = a + 1; b < n; ++b) {
      const Vec eb = e(b);
      ss(a, b) = ss(b, a) =
          (psi(0, s + ea + eb) - psi(0, s + ea - eb) - psi(0, s - ea + eb) + psi(0, s - ea - eb)) / (4 * h * h);
    }
  }
  return tt - ts.dot(ss.ldlt().solve(ts));
}

}  // namespace

double geodesic_residual(const GeodesicSegment& seg, ResidualOptions options) {
  const auto& times = seg.path.times();
  if (times.size() < 3) throw Error(ErrorKind::InvalidArgument, "geodesic_residual needs at least 3 samples");
  const ResidualSetup r = residual_setup(seg.start(), seg.end(), options);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double t = times[i];
    if (t - r.h < times.front() || t + r.h > times.back()) continue;
    std::map<int, SymplecticPotential> us;
    for (int k = -1; k <= 1; ++k) us.emplace(k, seg.path.at(t + k * r.h));
    const Vec centre = seg.start().polytope().centroid();
    auto psi = [&](int k, const Vec& s) { return legendre_at(us.at(k), s, &centre).value; };
    for (const Vec& s : r.points) worst = std::max(worst, std::abs(residual_at(psi, s, r.h)));
  }
  return worst;
}

double kahler_linear_residual(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples,
                              ResidualOptions options) {
  require_same_space(u0, u1, "kahler_linear_residual");
  if (n_samples < 3) throw Error(ErrorKind::InvalidArgument, "kahler_linear_residual needs at least 3 samples");
  const ResidualSetup r = residual_setup(u0, u1, options);
  const Vec centre = u0.polytope().centroid();
  std::map<std::vector<double>, std::pair<double, double>> cache;
  auto ends = [&](const Vec& s) {
    std::vector<double> key(s.data(), s.data() + s.size());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto v = std::make_pair(legendre_at(u0, s, &centre).value, legendre_at(u1, s, &centre).value);
    cache.emplace(key, v);
    return v;
  };
  double worst = 0.0;
  for (int i = 1; i + 1 < n_samples; ++i) {
    const double t = static_cast<double>(i) / (n_samples - 1);
    if (t - r.h < 0 || t + r.h > 1) continue;
    auto psi = [&](int k, const Vec& s) {
      const double tk = t + k * r.h;
      auto [a, b] = ends(s);
      return (1 - tk) * a + tk * b;
    };
    for (const Vec& s : r.points) worst = std::max(worst, std::abs(residual_at(psi, s, r.h)));
  }
  return worst;
}

GeodesicRay ray_from_direction(const SymplecticPotential& u0, const Poly& w, double T_max, int n_samples) {
  if (!(T_max > 0)) throw Error(ErrorKind::InvalidArgument, "ray length must be positive");
  if (n_samples < 2) throw Error(ErrorKind::InvalidArgument, "a ray needs at least 2 samples");
  const Discretization& d = u0.disc();
  if (!w.is_affine()) {
    double worst = INFINITY;
    Vec where;
    auto check = [&](const Vec& x) {
      const double e = min_eigenvalue(w.jet(x, 2).hess);
      if (e < worst) {
        worst = e;
        where = x;
      }
    };
    for (const auto& x : d.grid().nodes) check(x);
    for (const auto& x : d.grid().points) check(x);
    if (worst < -1e-12)
      throw Error(ErrorKind::NotAdmissible, "ray direction is not convex: Hessian eigenvalue " +
                                                std::to_string(worst) + " at x = " + std::to_string(where(0)));
  }
  GeodesicRay ray{PotentialPath::ray(u0, w, T_max, n_samples), w, std::nullopt, {}, {}, {}};
  if (w.is_affine()) {
    const int n = u0.dimension();
    Vec a(n);
    a(0) = w.coeff(1, 0);
    if (n == 2) a(1) = w.coeff(0, 1);
    ray.affine = AffineField(a, w.coeff(0, 0));
  }
  for (const auto& u : ray.path.samples()) {
    ray.curvature.push_back(scalar_curvature(u));
    ray.calabi.push_back(calabi_energy(d, ray.curvature.back()));
    ray.yen_integrand.push_back(k_energy_rate(d, ray.curvature.back(), w));
  }
  return ray;
}

GeodesicRay ray_from_affine(const SymplecticPotential& u0, const AffineField& f, double T_max, int n_samples) {
  return ray_from_direction(u0, f.as_polynomial(), T_max, n_samples);
}

namespace {

// Points of the closed polytope where sup norms of polynomial differences are taken.
std::vector<Vec> sup_points(const Discretization& d) {
  std::vector<Vec> pts = d.grid().nodes;
  pts.insert(pts.end(), d.boundary().points.begin(), d.boundary().points.end());
  for (const auto& v : d.polytope().vertices()) pts.push_back(v);
  return pts;
}

double sup_abs(const Poly& p, const std::vector<Vec>& pts) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, std::abs(p(x)));
  return m;
}

}  // namespace

ExhaustionReport ray_by_exhaustion(const SymplecticPotential& u0, const GeodesicRay& ray,
                                   const std::vector<double>& T_list, double T_window) {
  require_same_space(u0, ray.base(), "ray_by_exhaustion");
  if (T_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty T list");
  for (std::size_t i = 1; i < T_list.size(); ++i)
    if (!(T_list[i] > T_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "T list must be increasing");
  ExhaustionReport r;
  r.T_list = T_list;
  r.T_window = T_window > 0 ? T_window : T_list.front();
  if (r.T_window > T_list.front()) throw Error(ErrorKind::InvalidArgument, "window longer than the shortest segment");
  const Discretization& d = u0.disc();
  const auto pts = sup_points(d);
  const int window_samples = 9;
  std::vector<double> wt(window_samples);
  for (int i = 0; i < window_samples; ++i) wt[i] = r.T_window * i / (window_samples - 1);

  r.parallel_constant = sup_abs(u0.smooth() - ray.base().smooth(), pts);
  // phi_T(t) = u0 + (t / T) (ray(T) - u0), the segment rescaled to [0, T].
  std::vector<std::vector<Poly>> segments;
  for (double T : T_list) {
    const Poly end = ray.path.smooth_at(T);
    std::vector<Poly> on_window;
    double m = 0.0;
    for (double t : wt) {
      const Poly phi = u0.smooth() + (end - u0.smooth()) * (t / T);
      m = std::max(m, sup_abs(phi - ray.path.smooth_at(t), pts));
      on_window.push_back(phi);
    }
    r.monitor.push_back(m);
    r.uniformity = std::max(r.uniformity, std::abs(m - r.parallel_constant));
    segments.push_back(std::move(on_window));
  }
  for (std::size_t k = 1; k < segments.size(); ++k) {
    double g = 0.0;
    for (int i = 0; i < window_samples; ++i) g = std::max(g, sup_abs(segments[k][i] - segments[k - 1][i], pts));
    r.gaps.push_back(g);
    if (k > 1 && g > r.gaps[k - 2] * (1 + 1e-12) + 1e-15) r.cauchy = false;
  }
  const double T = T_list.back();
  const Poly slope = (ray.path.smooth_at(T) - u0.smooth()) * (1.0 / T);
  r.approximate_ray.emplace(u0.discretization(), u0.has_reference(), std::vector<Poly>{u0.smooth(), slope}, wt);
  return r;
}

YenTrace yen_invariant(const GeodesicRay& ray, bool modified, double slack) {
  if (ray.times().size() < 5) throw Error(ErrorKind::InvalidArgument, "the invariant needs at least 5 ray samples");
  YenTrace y;
  y.times = ray.times();
  y.modified = modified;
  y.integrand = ray.yen_integrand;
  if (modified) {
    // rho_dot (S_bar - S - theta_c) with rho_dot = -w on the symplectic side.
    const Discretization& d = ray.base().disc();
    const AffineField theta = extremal_field(d).theta;
    const double shift = integrate_interior(d, [&](const Vec& x) { return ray.direction(x) * theta(x); });
    for (double& v : y.integrand) v += shift;
  }
  y.limit = y.integrand.back();
  for (std::size_t i = 1; i < y.integrand.size(); ++i)
    y.worst_step = std::min(y.worst_step, y.integrand[i] - y.integrand[i - 1]);
  if (y.worst_step < -slack)
    throw Error(ErrorKind::NonMonotoneTrace, "K-energy slope decreases by " + std::to_string(-y.worst_step) +
                                                 " along the ray");
  return y;
}

std::string to_string(Effectiveness e) {
  switch (e) {
    case Effectiveness::Vanishing: return "vanishing";
    case Effectiveness::Bounded: return "bounded";
    case Effectiveness::Growing: return "growing";
  }
  return "unknown";
}

EffectivenessProfile effectiveness_profile(const GeodesicRay& ray) {
  EffectivenessProfile p;
  p.times = ray.times();
  double max_ca = 0.0;
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    p.t2_calabi.push_back(p.times[i] * p.times[i] * ray.calabi[i]);
    max_ca = std::max(max_ca, ray.calabi[i]);
  }
  if (max_ca <= 1e-12) {
    p.verdict = Effectiveness::Vanishing;
    return p;
  }
  // Least-squares slope of log(t^2 Ca) against log t over the last half.
  const std::size_t first = p.times.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = first; i < p.times.size(); ++i) {
    if (p.times[i] <= 0 || p.t2_calabi[i] <= 0) continue;
    const double x = std::log(p.times[i]), y = std::log(p.t2_calabi[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  p.slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  if (p.slope < -0.1)
    p.verdict = Effectiveness::Vanishing;
  else if (p.slope <= 0.1)
    p.verdict = Effectiveness::Bounded;
  else
    p.verdict = Effectiveness::Growing;
  return p;
}

AmbientFamily ambient_of(const GeodesicRay& ray, bool self) {
  const int n = ray.base().dimension();
  Vec drift = ray.affine ? ray.affine->a : Vec(Vec::Zero(n));
  if (self) return {ray.base(), ray.direction, 0.0, drift};
  return {guillemin_potential(ray.base().discretization()), ray.direction, 1.0, drift};
}

namespace {

// Value, t-derivative and full (t, s) Hessian of the Legendre dual of
// base + t w (plus c e^{-2t}) at s.
struct StripJet {
  double dt = 0;
  MatD hess;
};

StripJet strip_jet(const SymplecticPotential& u, const Poly& w, double c, double t, const Vec& s, Vec& warm) {
  const int n = u.dimension();
  const LegendrePoint lp = legendre_at(u, s, &warm);
  warm = lp.x;
  const Mat Ginv = u.hessian(lp.x).inverse();
  const Jet<double> wj = w.jet(lp.x, 1);
  const Vec gw = wj.grad;
  StripJet j;
  j.dt = -wj.value - 2 * c * std::exp(-2 * t);
  j.hess = MatD::Zero(n + 1, n + 1);
  j.hess(0, 0) = gw.dot(Ginv * gw) + 4 * c * std::exp(-2 * t);
  const Vec ts = -Ginv * gw;
  for (int a = 0; a < n; ++a) {
    j.hess(0, a + 1) = j.hess(a + 1, 0) = ts(a);
    for (int b = 0; b < n; ++b) j.hess(a + 1, b + 1) = Ginv(a, b);
  }
  return j;
}

}  // namespace

TamedReport tamed_diagnostics(const GeodesicRay& ray, const AmbientFamily& ambient, int points,
                              const StripSolution* strip) {
  require_same_space(ray.base(), ambient.base, "tamed_diagnostics");
  const int n = ray.base().dimension();
  const double S = 0.8 * default_s_max(ray.base());
  const auto box = box_points(n, S, points > 0 ? points : (n == 1 ? 17 : 9));
  TamedReport r;
  r.times = ray.times();
  const Discretization& d = ray.base().disc();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double t = r.times[i];
    const SymplecticPotential& u = ray.path.samples()[i];
    const SymplecticPotential ub(ambient.base.discretization(), ambient.base.smooth() + ambient.direction * t,
                                 ambient.base.has_reference());
    Vec w1 = d.polytope().centroid(), w2 = w1;
    double q1 = 0, q2 = 0;
    for (const Vec& s0 : box) {
      const Vec s = s0 + t * ambient.drift;
      const StripJet a = strip_jet(u, ray.direction, 0.0, t, s, w1);
      const StripJet b = strip_jet(ub, ambient.direction, ambient.c, t, s, w2);
      const MatD diff = a.hess - b.hess;
      const double trace = (n + 1) + b.hess.ldlt().solve(diff).trace();
      q1 = std::max(q1, std::abs(trace));
      q2 = std::max(q2, std::abs(a.dt - b.dt));
    }
    r.trace_term.push_back(q1);
    r.time_term.push_back(q2);
    r.trace_max = std::max(r.trace_max, q1);
    r.time_max = std::max(r.time_max, q2);
  }
  if (strip) {
    r.has_monitor = true;
    r.monitor_interior_max = strip->monitor.interior_max;
    r.monitor_boundary_max = strip->monitor.boundary_max;
    r.monitor_excess = strip->monitor.excess;
    r.boundary_maximum = strip->monitor.boundary_attains();
  }
  return r;
}

}  // namespace mabuchi
