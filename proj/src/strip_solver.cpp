#include "mabuchi/strip_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "mabuchi/legendre.hpp"

namespace mabuchi {

namespace {

// Node layout and finite-difference stencils on [0, T] x [-S, S]^n.
struct StripGrid {
  int n = 0, D = 0, Nt = 0, Ns = 0;
  double T = 0, S = 0;
  std::array<std::size_t, 4> stride{};
  std::array<double, 3> h{};
  std::size_t count = 0;

  StripGrid(int n_, double T_, double S_, int Nt_, int Ns_) : n(n_), D(n_ + 1), Nt(Nt_), Ns(Ns_), T(T_), S(S_) {
    stride[0] = 1;
    stride[1] = Nt + 1;
    stride[2] = stride[1] * (Ns + 1);
    stride[3] = stride[2] * (Ns + 1);
    h[0] = T / Nt;
    h[1] = h[2] = 2 * S / Ns;
    count = stride[D];
  }

  std::array<int, 3> index(std::size_t k) const {
    std::array<int, 3> idx{};
    idx[0] = static_cast<int>(k % stride[1]);
    for (int a = 1; a < D; ++a) idx[a] = static_cast<int>((k / stride[a]) % (Ns + 1));
    return idx;
  }
  std::size_t s_node(std::size_t k) const { return k / stride[1]; }
  bool lateral(std::size_t k) const {
    auto idx = index(k);
    for (int a = 1; a < D; ++a)
      if (idx[a] == 0 || idx[a] == Ns) return true;
    return false;
  }
  bool interior(std::size_t k) const {
    auto idx = index(k);
    return idx[0] > 0 && idx[0] < Nt && !lateral(k);
  }

  // Central second differences; at t = 0 or T one-sided of second order in t.
  MatD hessian(const std::vector<double>& v, std::size_t k) const {
    MatD H(D, D);
    const int it = index(k)[0];
    auto dt = [&](std::size_t m) {  // first t-derivative at node m (same t-row as k)
      if (it == 0) return (-3 * v[m] + 4 * v[m + 1] - v[m + 2]) / (2 * h[0]);
      if (it == Nt) return (3 * v[m] - 4 * v[m - 1] + v[m - 2]) / (2 * h[0]);
      return (v[m + 1] - v[m - 1]) / (2 * h[0]);
    };
    for (int a = 0; a < D; ++a) {
      const std::size_t sa = stride[a];
      if (a == 0 && it == 0)
        H(0, 0) = (2 * v[k] - 5 * v[k + 1] + 4 * v[k + 2] - v[k + 3]) / (h[0] * h[0]);
      else if (a == 0 && it == Nt)
        H(0, 0) = (2 * v[k] - 5 * v[k - 1] + 4 * v[k - 2] - v[k - 3]) / (h[0] * h[0]);
      else
        H(a, a) = (v[k + sa] - 2 * v[k] + v[k - sa]) / (h[a] * h[a]);
      for (int b = a + 1; b < D; ++b) {
        const std::size_t sb = stride[b];
        double m;
        if (a == 0)
          m = (dt(k + sb) - dt(k - sb)) / (2 * h[b]);
        else
          m = (v[k + sa + sb] - v[k + sa - sb] - v[k - sa + sb] + v[k - sa - sb]) / (4 * h[a] * h[b]);
        H(a, b) = H(b, a) = m;
      }
    }
    return H;
  }
};

MatD adjugate(const MatD& H) {
  MatD C(H.rows(), H.cols());
  if (H.rows() == 2) {
    C << H(1, 1), -H(0, 1), -H(1, 0), H(0, 0);
    return C;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      C(j, i) = H(i1, j1) * H(i2, j2) - H(i1, j2) * H(i2, j1);
    }
  return C;
}

bool positive_definite(const MatD& H) {
  Eigen::LLT<MatD> llt(H);
  return llt.info() == Eigen::Success;
}

double min_eig(const MatD& H) {
  Eigen::SelfAdjointEigenSolver<MatD> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct Problem {
  StripGrid grid;
  std::vector<double> psi0, psi1;  // on the s-nodes
  std::vector<double> linear;      // l
  std::vector<double> ambient;     // rho_bar
  std::vector<double> ambient_det; // det D^2_h rho_bar at interior nodes
  std::vector<double> lateral;     // limit of the lateral data as eps -> 0
  double A = 0;
  std::vector<std::ptrdiff_t> unknown;  // node -> unknown index or -1
  std::vector<std::size_t> nodes;       // unknown -> node
};

Problem setup(const SymplecticPotential& u0, const SymplecticPotential& u1, double T, const StripOptions& o) {
  require_same_space(u0, u1, "solve_hcma_regularized");
  if (!(T > 0)) throw Error(ErrorKind::InvalidArgument, "strip length T must be positive");
  const int n = u0.dimension();
  const int Ns = o.cells_s > 0 ? o.cells_s : (n == 1 ? 64 : 16);
  if (o.cells_t < 4 || Ns < 4) throw Error(ErrorKind::InvalidArgument, "strip grid needs at least 4 cells per axis");
  const double S = o.s_max > 0 ? o.s_max : std::max(default_s_max(u0), default_s_max(u1));
  Problem p{StripGrid(n, T, S, o.cells_t, Ns), {}, {}, {}, {}, {}, {}, 0, {}, {}};
  const StripGrid& g = p.grid;
  p.psi0 = legendre_dual(u0, S, Ns).values;
  p.psi1 = legendre_dual(u1, S, Ns).values;

  p.linear.resize(g.count);
  for (std::size_t k = 0; k < g.count; ++k) {
    const double tau = g.index(k)[0] / static_cast<double>(g.Nt);
    const std::size_t j = g.s_node(k);
    p.linear[k] = (1 - tau) * p.psi0[j] + tau * p.psi1[j];
  }
  // A = 2 max w^T M^{-1} w + 1/T^2 with [0 w^T; w M] the discrete Hessian of l.
  double worst = 0.0;
  for (std::size_t k = 0; k < g.count; ++k) {
    if (!g.interior(k)) continue;
    const MatD H = g.hessian(p.linear, k);
    const MatD M = H.bottomRightCorner(n, n);
    const VecD w = H.block(1, 0, n, 1);
    Eigen::LLT<MatD> llt(M);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::NonConvexIterate, "discrete Hessian of the boundary data is not positive definite; refine cells_s");
    worst = std::max(worst, w.dot(llt.solve(w)));
  }
  p.A = 2 * worst + 1 / (T * T);
  p.ambient.resize(g.count);
  for (std::size_t k = 0; k < g.count; ++k) {
    const double t = g.index(k)[0] * g.h[0];
    p.ambient[k] = p.linear[k] + 0.5 * p.A * (t * t - t * T);
  }
  // On the truncation faces the data tend to the Legendre transform of the
  // interpolated symplectic potentials, which carries the shared vertex asymptotics.
  p.lateral = p.linear;
  const PotentialPath path = PotentialPath::linear(u0, u1, g.Nt + 1);
  for (int i = 1; i < g.Nt; ++i) {
    const SymplecticPotential& ut = path.samples()[static_cast<std::size_t>(i)];
    Vec warm = u0.polytope().centroid();
    for (std::size_t k = static_cast<std::size_t>(i); k < g.count; k += g.stride[1]) {
      if (!g.lateral(k)) continue;
      const std::size_t j = g.s_node(k);
      const int N = g.Ns + 1;
      const Vec s = n == 1 ? make_vec(-S + static_cast<double>(j) * g.h[1])
                           : make_vec(-S + static_cast<double>(j % N) * g.h[1], -S + static_cast<double>(j / N) * g.h[1]);
      const LegendrePoint lp = legendre_at(ut, s, &warm);
      p.lateral[k] = lp.value;
    }
  }
  p.ambient_det.assign(g.count, 0.0);
  p.unknown.assign(g.count, -1);
  for (std::size_t k = 0; k < g.count; ++k) {
    if (!g.interior(k)) continue;
    p.ambient_det[k] = g.hessian(p.ambient, k).determinant();
    p.unknown[k] = static_cast<std::ptrdiff_t>(p.nodes.size());
    p.nodes.push_back(k);
  }
  return p;
}

// Warm start for a smaller eps: the previous solution's deviation from l, rescaled.
std::vector<double> rescaled(const Problem& p, const std::vector<double>& v, double ratio) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = p.linear[k] + ratio * (v[k] - p.linear[k]);
  return out;
}

void apply_boundary(const Problem& p, double eps, std::vector<double>& v) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (p.unknown[k] < 0) v[k] = p.lateral[k] + eps * (p.ambient[k] - p.lateral[k]);
}

struct Evaluation {
  Eigen::VectorXd F;
  double residual = 0;
  bool convex = true;
  double min_eigenvalue = INFINITY;
};

Evaluation evaluate(const Problem& p, double eps, const std::vector<double>& v) {
  Evaluation e;
  e.F.resize(static_cast<Eigen::Index>(p.nodes.size()));
  for (std::size_t r = 0; r < p.nodes.size(); ++r) {
    const std::size_t k = p.nodes[r];
    const MatD H = p.grid.hessian(v, k);
    if (!positive_definite(H)) e.convex = false;
    e.F(static_cast<Eigen::Index>(r)) = H.determinant() - eps * p.ambient_det[k];
  }
  e.residual = e.F.size() ? e.F.cwiseAbs().maxCoeff() : 0.0;
  return e;
}

Eigen::SparseMatrix<double> jacobian(const Problem& p, const std::vector<double>& v) {
  const StripGrid& g = p.grid;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(p.nodes.size() * (g.D == 2 ? 9 : 19));
  auto add = [&](std::size_t row, std::size_t node, double val) {
    const std::ptrdiff_t col = p.unknown[node];
    if (col >= 0) trips.emplace_back(static_cast<int>(row), static_cast<int>(col), val);
  };
  for (std::size_t r = 0; r < p.nodes.size(); ++r) {
    const std::size_t k = p.nodes[r];
    const MatD C = adjugate(g.hessian(v, k));
    for (int a = 0; a < g.D; ++a) {
      const std::size_t sa = g.stride[a];
      const double c = C(a, a) / (g.h[a] * g.h[a]);
      add(r, k + sa, c);
      add(r, k - sa, c);
      add(r, k, -2 * c);
      for (int b = a + 1; b < g.D; ++b) {
        const std::size_t sb = g.stride[b];
        const double m = 2 * C(a, b) / (4 * g.h[a] * g.h[b]);
        add(r, k + sa + sb, m);
        add(r, k - sa - sb, m);
        add(r, k + sa - sb, -m);
        add(r, k - sa + sb, -m);
      }
    }
  }
  Eigen::SparseMatrix<double> J(static_cast<int>(p.nodes.size()), static_cast<int>(p.nodes.size()));
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

struct StageResult {
  std::vector<double> values;
  int iterations = 0;
  double residual = 0;
};

// Damped Newton for one eps. Throws NonConvexIterate when no step along the
// Newton direction keeps the discrete Hessian positive definite.
StageResult newton(const Problem& p, double eps, std::vector<double> v, const StripOptions& o) {
  apply_boundary(p, eps, v);
  Evaluation cur = evaluate(p, eps, v);
  StageResult out;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern = false;
  for (int it = 0; it < o.max_newton; ++it) {
    if (cur.convex && cur.residual <= o.tolerance) {
      out.values = std::move(v);
      out.iterations = it;
      out.residual = cur.residual;
      return out;
    }
    const auto J = jacobian(p, v);
    if (!pattern) {
      lu.analyzePattern(J);
      pattern = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NewtonDivergence, "singular Newton Jacobian on the strip");
    const Eigen::VectorXd delta = lu.solve(-cur.F);
    double alpha = 1.0;
    bool convex_seen = false;
    bool accepted = false;
    for (int halving = 0; halving <= o.max_halvings; ++halving, alpha *= 0.5) {
      std::vector<double> trial = v;
      for (std::size_t r = 0; r < p.nodes.size(); ++r) trial[p.nodes[r]] += alpha * delta(static_cast<Eigen::Index>(r));
      Evaluation e = evaluate(p, eps, trial);
      if (!e.convex) continue;
      convex_seen = true;
      if (!cur.convex || e.residual < cur.residual) {
        v = std::move(trial);
        cur = std::move(e);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!convex_seen)
        throw Error(ErrorKind::NonConvexIterate, "Newton iterate lost convexity at eps = " + std::to_string(eps));
      throw Error(ErrorKind::NewtonDivergence, "line search failed " + std::to_string(o.max_halvings) +
                                                   " times at eps = " + std::to_string(eps) +
                                                   ", residual " + std::to_string(cur.residual));
    }
  }
  if (cur.convex && cur.residual <= o.tolerance) {
    out.values = std::move(v);
    out.iterations = o.max_newton;
    out.residual = cur.residual;
    return out;
  }
  throw Error(ErrorKind::NewtonDivergence, "Newton did not reach the tolerance at eps = " + std::to_string(eps) +
                                               ", residual " + std::to_string(cur.residual));
}

StripSolution package(const Problem& p, double eps, StageResult&& r, int total, int stages,
                      std::optional<double> lambda) {
  StripSolution s;
  s.n = p.grid.n;
  s.T = p.grid.T;
  s.s_max = p.grid.S;
  s.eps = eps;
  s.cells_t = p.grid.Nt;
  s.cells_s = p.grid.Ns;
  s.ambient_A = p.A;
  s.values = std::move(r.values);
  s.ambient = p.ambient;
  s.relative.resize(s.values.size());
  for (std::size_t k = 0; k < s.values.size(); ++k) s.relative[k] = s.values[k] - s.ambient[k];
  s.newton_iterations = r.iterations;
  s.total_iterations = total;
  s.stages = stages;
  s.residual = r.residual;
  s.min_hessian_eigenvalue = INFINITY;
  for (std::size_t k : p.nodes) s.min_hessian_eigenvalue = std::min(s.min_hessian_eigenvalue, min_eig(p.grid.hessian(s.values, k)));
  s.monitor = lambda ? maximum_principle_monitor(s, *lambda) : maximum_principle_monitor(s);
  return s;
}

}  // namespace

double StripSolution::t_at(std::size_t node) const { return static_cast<double>(node % (cells_t + 1)) * ht(); }

Vec StripSolution::s_at(std::size_t node) const {
  const std::size_t j = node / (cells_t + 1);
  const int N = cells_s + 1;
  if (n == 1) return make_vec(-s_max + static_cast<double>(j) * hs());
  return make_vec(-s_max + static_cast<double>(j % N) * hs(), -s_max + static_cast<double>(j / N) * hs());
}

bool StripSolution::lateral(std::size_t node) const {
  return StripGrid(n, T, s_max, cells_t, cells_s).lateral(node);
}

double StripSolution::range() const {
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

std::vector<StripSolution> solve_hcma_sequence(const SymplecticPotential& u0, const SymplecticPotential& u1,
                                               double T, const std::vector<double>& eps_list, StripOptions options) {
  if (eps_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty eps schedule");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive, got " + std::to_string(eps_list[i]));
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "eps schedule must be strictly decreasing");
    if (eps_list[i] > 1) throw Error(ErrorKind::InvalidArgument, "eps must not exceed 1");
  }
  const Problem p = setup(u0, u1, T, options);
  std::vector<StripSolution> out;
  std::vector<double> current = p.ambient;  // exact solution at eps = 1
  double eps = 1.0;
  double log_step = 1.0;
  int total = 0, stages = 0;
  for (double target : eps_list) {
    if (target == 1.0) {
      StageResult r{current, 0, evaluate(p, 1.0, current).residual};
      out.push_back(package(p, 1.0, std::move(r), total, stages, options.lambda));
      continue;
    }
    while (true) {
      const double next = std::max(target, eps * std::pow(10.0, -log_step));
      try {
        StageResult r = newton(p, next, rescaled(p, current, next / eps), options);
        total += r.iterations;
        ++stages;
        eps = next;
        if (eps == target) {
          current = r.values;
          out.push_back(package(p, eps, std::move(r), total, stages, options.lambda));
          break;
        }
        current = std::move(r.values);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonConvexIterate && e.kind() != ErrorKind::NewtonDivergence) throw;
        log_step *= 0.5;
        if (log_step < 1e-3) throw;
      }
    }
  }
  return out;
}

StripSolution solve_hcma_regularized(const SymplecticPotential& u0, const SymplecticPotential& u1, double T,
                                     double eps, StripOptions options) {
  if (!(eps > 0))
    throw Error(ErrorKind::InvalidArgument,
                "eps must be positive; the degenerate limit is approached through solve_hcma_sequence");
  return std::move(solve_hcma_sequence(u0, u1, T, {eps}, options).back());
}

double ambient_curvature_bound(const StripSolution& sol) {
  const StripGrid g(sol.n, sol.T, sol.s_max, sol.cells_t, sol.cells_s);
  const int D = g.D;
  double C = INFINITY;
  for (std::size_t k = 0; k < g.count; ++k) {
    const auto idx = g.index(k);
    bool inside = idx[0] > 0 && idx[0] < g.Nt;
    for (int a = 1; a < D; ++a) inside = inside && idx[a] >= 2 && idx[a] <= g.Ns - 2;
    if (!inside) continue;
    auto H = [&](std::size_t m) { return g.hessian(sol.ambient, m); };
    const MatD Hb = H(k);
    // dH[c] = d_c D^2 rho_bar, ddH[c][d] = d_c d_d D^2 rho_bar.
    std::array<MatD, 3> dH;
    std::array<std::array<MatD, 3>, 3> ddH;
    for (int c = 0; c < D; ++c) {
      const std::size_t sc = g.stride[c];
      const MatD hp = H(k + sc), hm = H(k - sc);
      dH[c] = (hp - hm) / (2 * g.h[c]);
      ddH[c][c] = (hp - 2 * Hb + hm) / (g.h[c] * g.h[c]);
      for (int d = c + 1; d < D; ++d) {
        const std::size_t sd = g.stride[d];
        ddH[c][d] = ddH[d][c] = (H(k + sc + sd) - H(k + sc - sd) - H(k - sc + sd) + H(k - sc - sd)) /
                                (4 * g.h[c] * g.h[d]);
      }
    }
    // Frame orthonormal for the ambient metric that diagonalizes D^2 psi~.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(g.hessian(sol.values, k), Hb);
    const Eigen::MatrixXd E = es.eigenvectors();
    const MatD Hinv = Hb.inverse();
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        if (i == j) continue;
        const VecD e = E.col(i), f = E.col(j);
        // Hessian metric (1/4) D^2 rho_bar: R(e, e, f, f) for unit e, f in D^2 rho_bar.
        double fourth = 0.0;
        VecD w = VecD::Zero(D);
        for (int c = 0; c < D; ++c)
          for (int d = 0; d < D; ++d) fourth += f(c) * f(d) * e.dot(ddH[c][d] * e);
        for (int q = 0; q < D; ++q)
          for (int c = 0; c < D; ++c) w(q) += f(c) * e.dot(dH[c].col(q));
        C = std::min(C, -fourth + w.dot(Hinv * w));
      }
  }
  return C;
}

MonitorReport maximum_principle_monitor(const StripSolution& sol) {
  const double C = ambient_curvature_bound(sol);
  auto m = maximum_principle_monitor(sol, 1.0 - C);
  m.curvature = C;
  return m;
}

MonitorReport maximum_principle_monitor(const StripSolution& sol, double lambda) {
  const StripGrid g(sol.n, sol.T, sol.s_max, sol.cells_t, sol.cells_s);
  MonitorReport m;
  m.lambda = lambda;
  m.interior_max = -INFINITY;
  m.boundary_max = -INFINITY;
  for (std::size_t k = 0; k < g.count; ++k) {
    if (g.lateral(k) || sol.s_at(k).cwiseAbs().maxCoeff() > kMonitorWindow * sol.s_max + 1e-12) continue;
    const MatD Hb = g.hessian(sol.ambient, k);
    const MatD H = g.hessian(sol.values, k);
    const double val = std::exp(-lambda * sol.relative[k]) * Hb.ldlt().solve(H).trace();
    const int it = g.index(k)[0];
    if (it == 0 || it == g.Nt)
      m.boundary_max = std::max(m.boundary_max, val);
    else
      m.interior_max = std::max(m.interior_max, val);
  }
  m.excess = (m.interior_max - m.boundary_max) / std::abs(m.boundary_max);
  return m;
}

double strip_error(const StripSolution& sol, const SymplecticPotential& u0, const SymplecticPotential& u1) {
  const PotentialPath path = PotentialPath::linear(u0, u1, sol.cells_t + 1);
  const std::size_t row = static_cast<std::size_t>(sol.cells_t + 1);
  double err = 0.0;
  for (int i = 0; i <= sol.cells_t; ++i) {
    const KahlerSidePotential psi = legendre_dual(path.samples()[i], sol.s_max, sol.cells_s);
    for (std::size_t j = 0; j < psi.size(); ++j)
      err = std::max(err, std::abs(sol.values[static_cast<std::size_t>(i) + row * j] - psi.values[j]));
  }
  return err;
}

}  // namespace mabuchi
