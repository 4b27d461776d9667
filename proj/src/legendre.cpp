#include "mabuchi/legendre.hpp"

#include <cmath>

namespace mabuchi {

LegendrePoint legendre_at(const SymplecticPotential& u, const Vec& s, const Vec* start) {
  const MomentPolytope& p = u.polytope();
  Vec y = start ? *start : p.centroid();
  if (!p.contains(y, 0.0) || p.min_facet_value(y) <= 0) y = p.centroid();
  auto objective = [&](const Vec& z) { return u.value(z) - s.dot(z); };

  LegendrePoint out;
  double f = objective(y);
  for (int it = 0; it < 200; ++it) {
    const Jet<double> j = u.jet(y, 2);
    const Vec g = j.grad - s;
    const Vec d = -j.hess.llt().solve(g);
    const double decrement2 = -g.dot(d);
    out.iterations = it + 1;
    if (!(decrement2 >= 0)) throw Error(ErrorKind::NonConvexIterate, "Legendre Newton lost convexity");
    if (decrement2 < 1e-28 || d.cwiseAbs().maxCoeff() < 1e-15) break;

    double alpha = 1.0;
    for (const auto& facet : p.facets()) {
      const double nd = facet.normal_real().dot(d);
      if (nd < 0) alpha = std::min(alpha, 0.99 * facet.value(y) / -nd);
    }
    if (decrement2 < 1e-8) {
      // Inside the quadratic-convergence region; objective differences drown in rounding.
      y += alpha * d;
      f = objective(y);
      continue;
    }
    int halvings = 0;
    while (true) {
      const Vec trial = y + alpha * d;
      const double ft = objective(trial);
      if (ft <= f - 1e-4 * alpha * decrement2) {
        y = trial;
        f = ft;
        break;
      }
      alpha *= 0.5;
      if (++halvings > 60) throw Error(ErrorKind::NewtonDivergence, "Legendre line search failed");
    }
    if (it == 199) throw Error(ErrorKind::NewtonDivergence, "Legendre Newton did not converge");
  }
  out.x = y;
  out.value = s.dot(y) - u.value(y);
  return out;
}

int default_dual_cells(int dim) { return dim == 1 ? 256 : 64; }

bool KahlerSidePotential::convex(double tol) const {
  const int N = per_axis();
  const double hs = spacing();
  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(i + N * j)]; };
  if (dim == 1) {
    for (int i = 1; i + 1 < N; ++i)
      if (at(i - 1, 0) - 2 * at(i, 0) + at(i + 1, 0) < -tol) return false;
    return true;
  }
  for (int j = 1; j + 1 < N; ++j)
    for (int i = 1; i + 1 < N; ++i) {
      const double a = (at(i - 1, j) - 2 * at(i, j) + at(i + 1, j)) / (hs * hs);
      const double c = (at(i, j - 1) - 2 * at(i, j) + at(i, j + 1)) / (hs * hs);
      const double b = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4 * hs * hs);
      if (a < -tol || c < -tol || a * c - b * b < -tol) return false;
    }
  return true;
}

bool KahlerSidePotential::gradients_in(const MomentPolytope& p, double tol) const {
  for (const auto& x : maximizers)
    if (!p.contains(x, tol)) return false;
  return true;
}

KahlerSidePotential legendre_dual(const SymplecticPotential& u, double s_max, int cells) {
  if (!(s_max > 0)) throw Error(ErrorKind::InvalidArgument, "S_max must be positive");
  const int n = u.dimension();
  const auto& g = u.disc().grid();
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    if (g.near_boundary[k]) continue;
    const double slope = u.gradient(g.nodes[k]).cwiseAbs().maxCoeff();
    if (slope > s_max * (1 + 1e-12))
      throw Error(ErrorKind::TruncationTooSmall, "gradient " + std::to_string(slope) + " at an interior node exceeds S_max = " +
                                                     std::to_string(s_max));
  }

  KahlerSidePotential psi;
  psi.dim = n;
  psi.s_max = s_max;
  psi.cells = cells > 0 ? cells : default_dual_cells(n);
  const int N = psi.per_axis();
  const double hs = psi.spacing();
  const int total = n == 1 ? N : N * N;
  psi.nodes.reserve(total);
  Vec warm = u.polytope().centroid();
  Vec row_start = warm;
  for (int idx = 0; idx < total; ++idx) {
    const int i = idx % N, j = idx / N;
    Vec s = n == 1 ? make_vec(-s_max + i * hs) : make_vec(-s_max + i * hs, -s_max + j * hs);
    if (i == 0) warm = row_start;
    LegendrePoint lp = legendre_at(u, s, &warm);
    warm = lp.x;
    if (i == 0) row_start = lp.x;
    psi.nodes.push_back(s);
    psi.values.push_back(lp.value);
    psi.maximizers.push_back(lp.x);
  }
  for (const auto& v : u.polytope().vertices()) psi.vertex_asymptotics.emplace_back(v, u.value(v));
  return psi;
}

double discrete_legendre(const KahlerSidePotential& psi, const Vec& x) {
  double best = -INFINITY;
  for (std::size_t k = 0; k < psi.size(); ++k) best = std::max(best, psi.nodes[k].dot(x) - psi.values[k]);
  return best;
}

double involution_error(const SymplecticPotential& u, const KahlerSidePotential& psi) {
  const auto& g = u.disc().grid();
  double err = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    if (g.near_boundary[k]) continue;
    err = std::max(err, std::abs(discrete_legendre(psi, g.nodes[k]) - u.value(g.nodes[k])));
  }
  return err;
}

}  // namespace mabuchi
