#include "mabuchi/quadrature.hpp"

#include <cmath>

#include "mabuchi/errors.hpp"

namespace mabuchi {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q) {
  if (q < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be positive");
  std::vector<double> x(q), w(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= q; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = q * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[q - 1 - i] = z;
    w[i] = w[q - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q, double a, double b) {
  auto [x, w] = gauss_legendre(q);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < q; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {x, w};
}

double InteriorGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double BoundaryMeasure::facet_total(int i) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (facet[k] == i) s += weights[k];
  return s;
}

double default_spacing(int dim) { return dim == 1 ? 1.0 / 64.0 : 1.0 / 48.0; }

namespace {

int default_order(int) { return 3; }

using Polygon = std::vector<Eigen::Vector2d>;

Polygon clip(const Polygon& poly, const Facet& f) {
  Polygon out;
  const Eigen::Vector2d nu = f.normal.cast<double>();
  const int m = static_cast<int>(poly.size());
  for (int k = 0; k < m; ++k) {
    const auto& a = poly[k];
    const auto& b = poly[(k + 1) % m];
    double va = nu.dot(a) - f.offset, vb = nu.dot(b) - f.offset;
    if (va >= 0) out.push_back(a);
    if ((va >= 0) != (vb >= 0)) out.push_back(a + (va / (va - vb)) * (b - a));
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

// Collapsed (Duffy) tensor rule on the triangle abc.
void triangle_rule(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const std::vector<double>& x01, const std::vector<double>& w01, InteriorGrid& g) {
  const double area2 = std::abs((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
  if (area2 <= 0) return;
  for (std::size_t i = 0; i < x01.size(); ++i) {
    for (std::size_t j = 0; j < x01.size(); ++j) {
      const double u = x01[i], v = x01[j];
      Eigen::Vector2d p = a + u * (b - a) + u * v * (c - b);
      g.points.push_back(make_vec(p.x(), p.y()));
      g.weights.push_back(w01[i] * w01[j] * u * area2);
    }
  }
}

}  // namespace

InteriorGrid build_interior_grid(const MomentPolytope& p, double h, int order) {
  if (!(h > 0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  InteriorGrid g;
  g.h = h;
  g.order = order;
  auto [x01, w01] = gauss_legendre(order, 0.0, 1.0);
  const Vec lo = p.lower(), hi = p.upper();

  if (p.dimension() == 1) {
    const int i0 = static_cast<int>(std::floor(lo(0) / h + 1e-9));
    const int i1 = static_cast<int>(std::ceil(hi(0) / h - 1e-9));
    for (int i = i0; i < i1; ++i) {
      const double a = std::max(lo(0), i * h), b = std::min(hi(0), (i + 1) * h);
      if (b - a <= 1e-14 * h) continue;
      for (int k = 0; k < order; ++k) {
        g.points.push_back(make_vec(a + (b - a) * x01[k]));
        g.weights.push_back((b - a) * w01[k]);
      }
    }
    for (int i = i0; i <= i1; ++i) {
      Vec x = make_vec(i * h);
      if (p.min_facet_value(x) <= 1e-12) continue;
      g.nodes.push_back(x);
      g.near_boundary.push_back(p.boundary_distance(x) < h * (1 - 1e-9));
    }
    return g;
  }

  const int i0 = static_cast<int>(std::floor(lo(0) / h + 1e-9)), i1 = static_cast<int>(std::ceil(hi(0) / h - 1e-9));
  const int j0 = static_cast<int>(std::floor(lo(1) / h + 1e-9)), j1 = static_cast<int>(std::ceil(hi(1) / h - 1e-9));
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) {
      Polygon cell = {{i * h, j * h}, {(i + 1) * h, j * h}, {(i + 1) * h, (j + 1) * h}, {i * h, (j + 1) * h}};
      bool inside = true;
      for (const auto& c : cell) inside = inside && p.contains(make_vec(c.x(), c.y()), 0.0);
      if (inside) {
        for (int b = 0; b < order; ++b)
          for (int a = 0; a < order; ++a) {
            g.points.push_back(make_vec((i + x01[a]) * h, (j + x01[b]) * h));
            g.weights.push_back(w01[a] * w01[b] * h * h);
          }
        continue;
      }
      Polygon poly = cell;
      for (const auto& f : p.facets()) {
        poly = clip(poly, f);
        if (poly.size() < 3) break;
      }
      if (poly.size() < 3 || polygon_area(poly) <= 1e-12 * h * h) continue;
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) triangle_rule(poly[0], poly[k], poly[k + 1], x01, w01, g);
    }
  }
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      Vec x = make_vec(i * h, j * h);
      if (p.min_facet_value(x) <= 1e-12) continue;
      g.nodes.push_back(x);
      g.near_boundary.push_back(p.boundary_distance(x) < h * (1 - 1e-9));
    }
  return g;
}

BoundaryMeasure build_boundary_measure(const MomentPolytope& p, double h, int order) {
  BoundaryMeasure bm;
  if (p.dimension() == 1) {
    for (int i = 0; i < 2; ++i) {
      bm.points.push_back(p.vertices()[i]);
      bm.weights.push_back(1.0);
      bm.facet.push_back(i);
    }
    return bm;
  }
  auto [x01, w01] = gauss_legendre(order + 1, 0.0, 1.0);
  for (int i = 0; i < p.facet_count(); ++i) {
    const auto& [a, b] = p.edges()[i];
    const double euclid = (b - a).norm();
    const double scale = euclid / p.facets()[i].normal_real().norm();
    const int m = std::max(1, static_cast<int>(std::ceil(euclid / h - 1e-9)));
    for (int s = 0; s < m; ++s)
      for (std::size_t k = 0; k < x01.size(); ++k) {
        const double t = (s + x01[k]) / m;
        bm.points.push_back(a + t * (b - a));
        bm.weights.push_back(w01[k] * scale / m);
        bm.facet.push_back(i);
      }
  }
  return bm;
}

Discretization::Discretization(MomentPolytope polytope, GridOptions options) : polytope_(std::move(polytope)) {
  const int n = polytope_.dimension();
  const double h = options.h > 0 ? options.h : default_spacing(n);
  const int q = options.order > 0 ? options.order : default_order(n);
  grid_ = build_interior_grid(polytope_, h, q);
  boundary_ = build_boundary_measure(polytope_, h, q);
}

bool Discretization::compatible(const Discretization& other) const {
  return this == &other || (polytope_.same_as(other.polytope_) && grid_.h == other.grid_.h &&
                            grid_.order == other.grid_.order);
}

DiscretizationPtr make_discretization(const MomentPolytope& p, GridOptions options) {
  return std::make_shared<const Discretization>(p, options);
}

DiscretizationPtr make_discretization(const std::string& name, GridOptions options) {
  return make_discretization(make_polytope(name), options);
}

double integrate_interior(const MomentPolytope& p, const InteriorGrid& grid, const std::vector<double>& f) {
  (void)p;
  if (f.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "interior values have size " + std::to_string(f.size()) + ", grid has " +
                                             std::to_string(grid.size()));
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += grid.weights[k] * f[k];
  return s;
}

double integrate_boundary(const MomentPolytope& p, const BoundaryMeasure& bm, const std::vector<double>& f) {
  (void)p;
  if (f.size() != bm.size())
    throw Error(ErrorKind::GridMismatch, "boundary values have size " + std::to_string(f.size()) + ", measure has " +
                                             std::to_string(bm.size()));
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += bm.weights[k] * f[k];
  return s;
}

double integrate_samples(const Discretization& d, const std::vector<double>& f) {
  return integrate_interior(d.polytope(), d.grid(), f);
}

}  // namespace mabuchi
