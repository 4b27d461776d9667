#pragma once

#include <Eigen/Dense>

#include "mabuchi/functionals.hpp"

namespace mabuchi {

/// theta = f - mean(f); the measure omega_u^n pushes forward to dx for every
/// metric, so only the additive constant depends on the polytope.
struct HolomorphyPotential {
  AffineField theta;
  double constant = 0.0;  // the subtracted mean
};

HolomorphyPotential theta_of_affine(const AffineField& f, const SymplecticPotential& u);
AffineField normalize(const AffineField& f, const Discretization& d);

/// int theta_f (S_bar - S) dx.
double futaki_invariant(const AffineField& f, const SymplecticPotential& u);
double futaki_invariant(const AffineField& f, const Discretization& d, const CurvatureField& c);

/// S_bar int f dx - 2 int_{dP} f dsigma: the same number by integration by parts.
double futaki_boundary_value(const AffineField& f, const Discretization& d);

double fm_inner(const AffineField& f, const AffineField& g, const SymplecticPotential& u);

/// Futaki-Mabuchi Gram matrix on the basis x_i - mean(x_i).
Eigen::MatrixXd fm_gram(const Discretization& d);

struct ExtremalField {
  Eigen::VectorXd coefficients;  // theta_c = sum_i c_i (x_i - mean(x_i))
  AffineField theta;
  double futaki_value = 0.0;     // F_{X_c} = (X_c, X_c)
  Eigen::MatrixXd gram;
  Eigen::VectorXd futaki_values; // F on the basis
};

/// Riesz representative of the Futaki character, with class values from the
/// boundary formula.
ExtremalField extremal_field(const Discretization& d);
/// Same, with Futaki values by curvature quadrature at u.
ExtremalField extremal_field(const SymplecticPotential& u);

/// Decomposition S_bar - S = rho + rho_perp with rho the L2(dx) projection
/// onto normalized affine functions, and the links of Ca >= F_{X_c}.
struct HwangReport {
  double calabi = 0.0;
  double rho_sq = 0.0;          // int rho^2
  double rho_perp_sq = 0.0;     // int rho_perp^2
  double rho_dot_residual = 0.0;  // int rho (S_bar - S)
  double cauchy_schwarz = 0.0;  // (int rho (S_bar - S))^2 / int rho^2
  double futaki_extremal = 0.0; // F_{X_c}, class value
  double decomposition_error = 0.0;  // |Ca - rho_sq - rho_perp_sq|
  Eigen::VectorXd projection;   // rho on the basis x_i - mean(x_i)

  double margin() const { return calabi - futaki_extremal; }
};

HwangReport hwang_bound(const SymplecticPotential& u);
HwangReport hwang_bound(const SymplecticPotential& u, const CurvatureField& c, const ExtremalField& xc);

}  // namespace mabuchi
