#pragma once

#include <vector>

#include "mabuchi/legendre.hpp"
#include "mabuchi/potential.hpp"

namespace mabuchi {

/// S = -sum_ij d_i d_j H^ij with H the inverse Hessian, from a fourth-order jet.
template <typename Scalar>
Scalar scalar_curvature_from_jet(const Jet<Scalar>& j) {
  const int n = j.dim;
  const MatrixN<Scalar> H = j.hess.inverse();
  std::array<MatrixN<Scalar>, 2> HT;
  for (int k = 0; k < n; ++k) HT[k] = H * j.third[k];
  Scalar s(0);
  // d_k d_l H = H T_l H T_k H + H T_k H T_l H - H Q_kl H
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const MatrixN<Scalar> ddH = HT[l] * HT[k] * H + HT[k] * HT[l] * H - H * j.fourth[k][l] * H;
      s -= ddH(k, l);
    }
  return s;
}

struct CurvatureField {
  std::vector<double> S;  // at the interior quadrature points
  double S_bar = 0.0;
  std::vector<double> residual;  // S - S_bar

  double sup_deviation() const;
};

double scalar_curvature_at(const SymplecticPotential& u, const Vec& x);
CurvatureField scalar_curvature(const SymplecticPotential& u);

double calabi_energy(const SymplecticPotential& u);
double calabi_energy(const Discretization& d, const CurvatureField& c);

/// u(t) = u_ref + sum_m t^m c_m on [t_begin, t_end], sampled at increasing
/// times. Velocities are exact.
class PotentialPath {
 public:
  PotentialPath(DiscretizationPtr disc, bool reference, std::vector<Poly> coefficients, std::vector<double> times);

  static PotentialPath constant(const SymplecticPotential& u, std::vector<double> times);
  /// (1 - t) u0 + t u1 on [0, 1].
  static PotentialPath linear(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples);
  /// u0 + tau(t) (u1 - u0) with tau a polynomial, tau(0) = 0, tau(1) = 1.
  static PotentialPath reparametrized(const SymplecticPotential& u0, const SymplecticPotential& u1,
                                      const std::vector<double>& tau, int n_samples);
  /// (1 - t) u0 + t u1 + t (1 - t) b.
  static PotentialPath bent(const SymplecticPotential& u0, const SymplecticPotential& u1, const Poly& b,
                            int n_samples);
  /// u0 + t w on [0, T].
  static PotentialPath ray(const SymplecticPotential& u0, const Poly& w, double T, int n_samples);

  const DiscretizationPtr& discretization() const { return disc_; }
  const Discretization& disc() const { return *disc_; }
  bool has_reference() const { return reference_; }
  const std::vector<Poly>& coefficients() const { return coeffs_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SymplecticPotential>& samples() const { return samples_; }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool linear_in_t() const { return coeffs_.size() <= 2; }

  Poly smooth_at(double t) const;
  SymplecticPotential at(double t) const;
  Poly velocity(double t) const;

 private:
  DiscretizationPtr disc_;
  bool reference_ = true;
  std::vector<Poly> coeffs_;
  std::vector<double> times_;
  std::vector<SymplecticPotential> samples_;
};

/// Kahler velocity is -du/dt under the Legendre transform; dI/dt = -int du/dt dx.
struct IFunctionalResult {
  std::vector<double> times;
  std::vector<double> values;  // I(u(t)) - I(u(t_begin))
  std::vector<double> rates;   // dI/dt
  double endpoint_value = 0.0;
};

IFunctionalResult i_functional(const PotentialPath& path);

double j_functional(const SymplecticPotential& u, const SymplecticPotential& base);

/// dE/dt = int phi_dot (S_bar - S) omega^n = int u_dot (S - S_bar) dx.
double k_energy_rate(const SymplecticPotential& u, const Poly& u_dot);
double k_energy_rate(const PotentialPath& path, double t);
double k_energy_rate(const Discretization& d, const CurvatureField& c, const Poly& u_dot);

constexpr int kDefaultTimeNodes = 11;

double k_energy_delta(const PotentialPath& path, int time_nodes = kDefaultTimeNodes);

/// int log(omega_u^n / omega_base^n) omega_u^n.
double entropy(const SymplecticPotential& u, const SymplecticPotential& base);

struct PathLength {
  double length = 0.0;
  std::vector<double> speeds;  // at the path samples
};

PathLength path_length(const PotentialPath& path, int time_nodes = kDefaultTimeNodes);

double geodesic_distance(const SymplecticPotential& u0, const SymplecticPotential& u1);

/// Both sides of max(int phi_- omega^n, int phi_+ omega_phi^n) <= d(0, phi),
/// with phi normalized by I(phi) = 0.
struct DistanceBound {
  double negative_part = 0.0;
  double positive_part = 0.0;
  double distance = 0.0;
  double margin() const { return distance - std::max(negative_part, positive_part); }
};

DistanceBound distance_lower_bound(const SymplecticPotential& u, const SymplecticPotential& base);

}  // namespace mabuchi
