#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mabuchi/geodesic.hpp"

namespace mabuchi {

struct StripOptions {
  int cells_t = 64;
  int cells_s = 0;       // per s-axis; 0 means 64 (n = 1) or 16 (n = 2)
  double s_max = 0.0;    // 0 means the larger default_s_max of the endpoints
  double tolerance = 1e-10;  // max-norm Newton residual
  int max_newton = 60;
  int max_halvings = 50;
  std::optional<double> lambda;  // monitor weight; unset means 1 - C (ambient_curvature_bound)
};

/// Maximum-principle monitor e^{-lambda psi~} tr((D^2 rho_bar)^{-1} D^2 Psi):
/// interior maximum against the maximum on the rows t = 0 and t = T. Both are
/// taken over |s|_inf <= kMonitorWindow * s_max, away from the artificial
/// lateral data.
inline constexpr double kMonitorWindow = 0.8;

struct MonitorReport {
  double lambda = 1.0;
  double curvature = NAN;  // C when lambda came from the curvature prescription
  double interior_max = 0.0;
  double boundary_max = 0.0;
  double excess = 0.0;  // (interior_max - boundary_max) / |boundary_max|
  bool boundary_attains(double slack = 0.02) const { return excess <= slack; }
};

/// Psi on [0, T] x [-s_max, s_max]^n solving det D^2 Psi = eps det D^2 rho_bar
/// with Psi = psi0, psi1 at t = 0, T. rho_bar = l + A (t^2 - tT) / 2 with l the
/// linear interpolation of psi0, psi1. On the lateral faces Psi = g + eps (rho_bar - g),
/// g the Legendre transform of the interpolated symplectic potentials, so
/// Psi = rho_bar solves the problem at eps = 1. Nodes are t-fastest.
struct StripSolution {
  int n = 0;  // polytope dimension; the strip has n + 1 coordinates
  double T = 0.0;
  double s_max = 0.0;
  double eps = 0.0;
  int cells_t = 0;
  int cells_s = 0;
  double ambient_A = 0.0;  // rho_bar = l + A (t^2 - t T) / 2
  std::vector<double> values;    // Psi
  std::vector<double> ambient;   // rho_bar
  std::vector<double> relative;  // psi~ = Psi - rho_bar
  int newton_iterations = 0;     // in the final stage
  int total_iterations = 0;
  int stages = 0;
  double residual = 0.0;
  double min_hessian_eigenvalue = 0.0;  // over interior nodes
  MonitorReport monitor;

  double ht() const { return T / cells_t; }
  double hs() const { return 2.0 * s_max / cells_s; }
  std::size_t size() const { return values.size(); }
  double t_at(std::size_t node) const;
  Vec s_at(std::size_t node) const;
  bool lateral(std::size_t node) const;
  double range() const;
};

/// Continuation from eps = 1 (where Psi = rho_bar) down to eps by factors of
/// 10, halving the log-step when an iterate loses convexity. eps must be > 0.
StripSolution solve_hcma_regularized(const SymplecticPotential& u0, const SymplecticPotential& u1, double T,
                                     double eps, StripOptions options = {});

/// One solution per eps (decreasing order required), warm-started in sequence.
std::vector<StripSolution> solve_hcma_sequence(const SymplecticPotential& u0, const SymplecticPotential& u1,
                                               double T, const std::vector<double>& eps_list,
                                               StripOptions options = {});

MonitorReport maximum_principle_monitor(const StripSolution& sol, double lambda);
/// lambda = 1 - C with C = ambient_curvature_bound(sol).
MonitorReport maximum_principle_monitor(const StripSolution& sol);

/// Infimum over interior nodes (two away from the lateral faces) of the
/// bisectional curvature R(e_i, e_i, e_k, e_k), i != k, of the ambient metric
/// (1/4) D^2 rho_bar in the orthonormal frame that diagonalizes D^2 psi~.
/// Derivatives by differences of the discrete Hessian.
double ambient_curvature_bound(const StripSolution& sol);

/// Sup over all nodes of |Psi - psi_{u(t)}|, u(t) the linear interpolation
/// of u0, u1 on [0, T].
double strip_error(const StripSolution& sol, const SymplecticPotential& u0, const SymplecticPotential& u1);

}  // namespace mabuchi
