#include "mabuchi/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mabuchi/errors.hpp"

namespace mabuchi {

namespace {

constexpr double kTol = 1e-9;

int gcd_of(const Eigen::VectorXi& v) {
  int g = 0;
  for (int i = 0; i < v.size(); ++i) g = std::gcd(g, std::abs(v(i)));
  return g;
}

Facet make_facet(std::initializer_list<int> normal, double offset) {
  Facet f;
  f.normal.resize(static_cast<Eigen::Index>(normal.size()));
  int k = 0;
  for (int c : normal) f.normal(k++) = c;
  f.offset = offset;
  return f;
}

}  // namespace

MomentPolytope::MomentPolytope(std::string name, std::vector<Facet> facets)
    : name_(std::move(name)), facets_(std::move(facets)) {
  if (facets_.empty()) throw Error(ErrorKind::Unbounded, "empty facet list");
  dim_ = static_cast<int>(facets_.front().normal.size());
  if (dim_ < 1 || dim_ > 2) throw Error(ErrorKind::InvalidArgument, "polytope dimension must be 1 or 2");
  for (const auto& f : facets_) {
    if (f.normal.size() != dim_) throw Error(ErrorKind::InvalidArgument, "facet normals of mixed dimension");
    if (gcd_of(f.normal) != 1) throw Error(ErrorKind::NotDelzant, "facet normal is not primitive");
  }
  if (dim_ == 1)
    validate_1d();
  else
    validate_2d();
  compute_measures();
}

void MomentPolytope::validate_1d() {
  double lo = -INFINITY, hi = INFINITY;
  int n_lo = 0, n_hi = 0;
  for (const auto& f : facets_) {
    if (f.normal(0) == 1) {
      lo = std::max(lo, f.offset);
      ++n_lo;
    } else {
      hi = std::min(hi, -f.offset);
      ++n_hi;
    }
  }
  if (n_lo == 0 || n_hi == 0) throw Error(ErrorKind::Unbounded, "segment needs a lower and an upper facet");
  if (n_lo > 1 || n_hi > 1) throw Error(ErrorKind::NotDelzant, "redundant facet");
  if (!(hi - lo > kTol)) throw Error(ErrorKind::InvalidArgument, "empty interior");
  // Ascending vertex order; facet order made [lower, upper].
  if (facets_[0].normal(0) != 1) std::swap(facets_[0], facets_[1]);
  vertices_ = {make_vec(lo), make_vec(hi)};
  vertex_facets_ = {{0}, {1}};
}

void MomentPolytope::validate_2d() {
  const int m = facet_count();
  // Bounded iff the normals positively span the plane: every angular gap < pi.
  std::vector<double> angles;
  for (const auto& f : facets_) angles.push_back(std::atan2(f.normal(1), f.normal(0)));
  std::sort(angles.begin(), angles.end());
  for (int i = 0; i < m; ++i) {
    double gap = (i + 1 < m ? angles[i + 1] : angles[0] + 2 * M_PI) - angles[i];
    if (gap >= M_PI - 1e-12) throw Error(ErrorKind::Unbounded, "facet normals do not positively span the plane");
  }

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Matrix2d N;
      N.row(0) = facets_[i].normal_real().transpose();
      N.row(1) = facets_[j].normal_real().transpose();
      if (std::abs(N.determinant()) < 0.5) continue;
      Eigen::Vector2d rhs(facets_[i].offset, facets_[j].offset);
      Vec p = N.partialPivLu().solve(rhs);
      if (!contains(p, kTol)) continue;
      bool dup = false;
      for (const auto& v : vertices_) dup = dup || (v - p).norm() < 1e-9;
      if (!dup) vertices_.push_back(p);
    }
  }
  if (vertices_.size() < 3) throw Error(ErrorKind::InvalidArgument, "polytope has empty interior");

  Vec c = Vec::Zero(2);
  for (const auto& v : vertices_) c += v;
  c /= static_cast<double>(vertices_.size());
  std::sort(vertices_.begin(), vertices_.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });

  for (const auto& v : vertices_) {
    std::vector<int> tight;
    for (int i = 0; i < m; ++i)
      if (std::abs(facets_[i].value(v)) < 1e-9) tight.push_back(i);
    if (tight.size() != 2) throw Error(ErrorKind::NotDelzant, "vertex lies on " + std::to_string(tight.size()) + " facets");
    Eigen::Matrix2i N;
    N.row(0) = facets_[tight[0]].normal.transpose();
    N.row(1) = facets_[tight[1]].normal.transpose();
    int det = N(0, 0) * N(1, 1) - N(0, 1) * N(1, 0);
    if (std::abs(det) != 1)
      throw Error(ErrorKind::NotDelzant, "vertex normals have determinant " + std::to_string(det));
    vertex_facets_.push_back(tight);
  }

  edges_.resize(m);
  std::vector<int> seen(m, 0);
  const int nv = static_cast<int>(vertices_.size());
  for (int k = 0; k < nv; ++k) {
    const Vec& a = vertices_[k];
    const Vec& b = vertices_[(k + 1) % nv];
    for (int i : vertex_facets_[k]) {
      if (std::abs(facets_[i].value(b)) < 1e-9) {
        edges_[i] = {a, b};
        ++seen[i];
      }
    }
  }
  for (int i = 0; i < m; ++i)
    if (seen[i] != 1) throw Error(ErrorKind::NotDelzant, "redundant facet " + std::to_string(i));
}

void MomentPolytope::compute_measures() {
  if (dim_ == 1) {
    volume_ = vertices_[1](0) - vertices_[0](0);
    boundary_volume_ = 2.0;
    centroid_ = make_vec(0.5 * (vertices_[0](0) + vertices_[1](0)));
    lower_ = vertices_[0];
    upper_ = vertices_[1];
    return;
  }
  double area = 0.0, cx = 0.0, cy = 0.0;
  const int nv = static_cast<int>(vertices_.size());
  lower_ = vertices_[0];
  upper_ = vertices_[0];
  for (int k = 0; k < nv; ++k) {
    const Vec& a = vertices_[k];
    const Vec& b = vertices_[(k + 1) % nv];
    double cr = a(0) * b(1) - b(0) * a(1);
    area += cr;
    cx += (a(0) + b(0)) * cr;
    cy += (a(1) + b(1)) * cr;
    lower_ = lower_.cwiseMin(a);
    upper_ = upper_.cwiseMax(a);
  }
  volume_ = 0.5 * area;
  centroid_ = make_vec(cx / (6.0 * volume_), cy / (6.0 * volume_));
  boundary_volume_ = 0.0;
  for (int i = 0; i < facet_count(); ++i)
    boundary_volume_ += (edges_[i].second - edges_[i].first).norm() / facets_[i].normal_real().norm();
}

Eigen::VectorXd MomentPolytope::facet_values(const Vec& x) const {
  Eigen::VectorXd l(facet_count());
  for (int i = 0; i < facet_count(); ++i) l(i) = facets_[i].value(x);
  return l;
}

double MomentPolytope::min_facet_value(const Vec& x) const { return facet_values(x).minCoeff(); }

double MomentPolytope::boundary_distance(const Vec& x) const {
  double d = INFINITY;
  for (const auto& f : facets_) d = std::min(d, f.value(x) / f.normal_real().norm());
  return d;
}

bool MomentPolytope::contains(const Vec& x, double tol) const {
  for (const auto& f : facets_)
    if (f.value(x) < -tol) return false;
  return true;
}

bool MomentPolytope::same_as(const MomentPolytope& other) const {
  if (dim_ != other.dim_ || facet_count() != other.facet_count()) return false;
  for (int i = 0; i < facet_count(); ++i) {
    if (facets_[i].normal != other.facets_[i].normal) return false;
    if (std::abs(facets_[i].offset - other.facets_[i].offset) > 1e-12) return false;
  }
  return true;
}

MomentPolytope make_polytope(const std::string& name) {
  if (name == "P1") return MomentPolytope("P1", {make_facet({1}, 0.0), make_facet({-1}, -1.0)});
  if (name == "P2")
    return MomentPolytope("P2", {make_facet({1, 0}, 0.0), make_facet({0, 1}, 0.0), make_facet({-1, -1}, -1.0)});
  if (name == "PF1")
    return MomentPolytope("PF1", {make_facet({1, 0}, 0.0), make_facet({0, 1}, 0.0), make_facet({-1, 0}, -1.0),
                                  make_facet({-1, -1}, -2.0)});
  throw Error(ErrorKind::InvalidArgument, "unknown polytope '" + name + "'");
}

MomentPolytope make_polytope(const std::string& name, const std::vector<Facet>& facets) {
  return MomentPolytope(name, facets);
}

MomentPolytope transformed(const MomentPolytope& p, const Eigen::Matrix2i& A, const Eigen::Vector2i& b) {
  if (p.dimension() != 2) throw Error(ErrorKind::InvalidArgument, "transform needs a 2-D polytope");
  const int det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  if (std::abs(det) != 1) throw Error(ErrorKind::InvalidArgument, "transform is not unimodular");
  // <nu, x> >= lambda with x = A^{-1}(y - b) becomes <A^{-T} nu, y> >= lambda + <A^{-T} nu, b>.
  Eigen::Matrix2i inv_t;
  inv_t << A(1, 1), -A(1, 0), -A(0, 1), A(0, 0);
  inv_t *= det;
  std::vector<Facet> out;
  for (const auto& f : p.facets()) {
    Facet g;
    g.normal = inv_t * f.normal;
    g.offset = f.offset + static_cast<double>(g.normal.dot(b.cast<int>()));
    out.push_back(g);
  }
  return MomentPolytope(p.name() + "'", out);
}

}  // namespace mabuchi
